//! Gate bootstrapping: RGSW refreshing keys, accumulator setup, AP and GINX
//! blind rotation, and sample extraction.

mod accumulate;
mod rgsw;

pub use accumulate::{
    acc_initialize, ap_accumulate, blind_rotate, bootstrap, bootstrap_with, extract, ginx_accumulate, prepare_a_dec,
    refresh_keygen, BootstrapContext, RefreshKey, RefreshKeyAp, RefreshKeyGinx, Selectors, Window,
};
pub use rgsw::{
    external_product, external_product_in_place, rgsw_encrypt_into, rgsw_keygen, rgsw_words, signed_digit_decompose,
    Accumulator, Gadget, OpCounts, RgswCiphertext, RgswRef, RlweSecret, Workspace,
};
