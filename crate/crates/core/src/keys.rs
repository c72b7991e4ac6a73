//! Client and server key bundles.

use crate::bootstrap::{refresh_keygen, BootstrapContext, RefreshKey, RlweSecret};
use crate::error::{Error, Result};
use crate::lwe::{self, keyswitch_keygen, KeySwitchKey, LweCiphertext, LweSecretKey};
use crate::params::{BootstrapMode, ParamSet};
use crate::sampler::Sampler;

/// Everything the data owner keeps: the LWE secret and the ring secret.
#[derive(Debug, Clone)]
pub struct ClientKey {
    pub params: ParamSet,
    pub lwe: LweSecretKey,
    pub ring_secret: RlweSecret,
}

impl ClientKey {
    /// Samples both secrets from the mode's distribution.
    pub fn generate(params: &ParamSet, mode: BootstrapMode, sampler: &mut Sampler) -> Result<Self> {
        let ctx = BootstrapContext::new(params)?;
        let dist = params.secret_dist_for(mode);
        let lwe = lwe::keygen(params, dist, sampler);
        let z: Vec<i64> = (0..params.ring_dim).map(|_| sampler.secret(dist)).collect();
        let ring_secret = RlweSecret::from_signed(&ctx.ring, z)?;
        Ok(ClientKey { params: params.clone(), lwe, ring_secret })
    }

    pub fn encrypt(&self, bit: bool, sampler: &mut Sampler) -> LweCiphertext {
        lwe::encrypt_bit(&self.params, &self.lwe, bit, sampler)
    }

    pub fn decrypt(&self, ct: &LweCiphertext) -> bool {
        lwe::decrypt_bit(&self.lwe, ct)
    }
}

/// Public evaluation material: refreshing key and key-switching key.
#[derive(Debug, Clone)]
pub struct ServerKey {
    pub ctx: BootstrapContext,
    pub refresh: RefreshKey,
    pub ksk: KeySwitchKey,
}

impl ServerKey {
    pub fn generate(client: &ClientKey, mode: BootstrapMode, sampler: &mut Sampler) -> Result<Self> {
        let ctx = BootstrapContext::new(&client.params)?;
        let mut refresh_rng = sampler.fork();
        let mut ks_rng = sampler.fork();
        let refresh = refresh_keygen(&ctx, &client.lwe, &client.ring_secret, mode, &mut refresh_rng)?;
        let ksk = keyswitch_keygen(client.ring_secret.signed(), &client.lwe, &client.params, &mut ks_rng);
        Ok(ServerKey { ctx, refresh, ksk })
    }

    /// Assembles a server key from stored parts, checking they agree.
    pub fn from_parts(params: &ParamSet, refresh: RefreshKey, ksk: KeySwitchKey) -> Result<Self> {
        let ctx = BootstrapContext::new(params)?;
        if ksk.shape() != (params.ring_dim, params.ks_digits, params.ks_base as usize)
            || ksk.target_dim() != params.lwe_dim
            || ksk.modulus() != params.ring_modulus
        {
            return Err(Error::Format("key-switch key does not match the parameter set".into()));
        }
        Ok(ServerKey { ctx, refresh, ksk })
    }

    pub fn params(&self) -> &ParamSet {
        &self.ctx.params
    }

    pub fn mode(&self) -> BootstrapMode {
        self.refresh.mode()
    }
}

/// Generates a matching client/server pair from one seed.
pub fn generate_keys(params: &ParamSet, mode: BootstrapMode, seed: u64) -> Result<(ClientKey, ServerKey)> {
    let mut sampler = Sampler::new(seed);
    let client = ClientKey::generate(params, mode, &mut sampler)?;
    let server = ServerKey::generate(&client, mode, &mut sampler)?;
    Ok((client, server))
}
