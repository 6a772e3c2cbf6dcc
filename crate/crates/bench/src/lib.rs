//! Shared fixtures for the criterion benches.

use panolift::synth::sinusoid_erp;
use panolift::ErpImage;

pub fn erp_512() -> ErpImage {
    sinusoid_erp(512, 3, 7)
}

pub fn erp_256() -> ErpImage {
    sinusoid_erp(256, 3, 7)
}
