//! Special functions, quantiles and the Student-t likelihood fit.

pub mod dist;
pub mod special;
pub mod tfit;

pub use dist::{
    chisq_cdf, chisq_quantile, chisq_sf, normal_cdf, normal_pdf, normal_quantile, t_cdf, t_pdf,
    t_quantile, t_sf,
};
pub use tfit::{fit_t_mle, t_loglik, TLocScaleFit};
