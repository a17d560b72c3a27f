//! Small configs, one per experiment type, for determinism runs.

#![allow(dead_code)]

use rwre_lab::experiment::ExperimentKind;

pub fn small_config(kind: ExperimentKind, seed: u64) -> String {
    let body = match kind {
        ExperimentKind::Moments => "[moments]\nenv_replicas = 2000\nwalks_per_env = 2\n",
        ExperimentKind::VarianceScan => "[variance-scan]\nn = [4, 8, 16, 32]\nreplicas = 60\nexponent_max = 1.5\n",
        ExperimentKind::PhiDecay => "[phi-decay]\nreplicas = 400\n",
        ExperimentKind::IdentityCheck => "[identity-check]\nenv_replicas = 200\ny_replicas = 500\n",
        ExperimentKind::Fclt => "[fclt]\nenv_seeds = 2\nepsilon = 0.0078125\nwalks = 400\nmin_pass = 1\n",
        ExperimentKind::MaxDrift => "[max-drift]\nreplicas = 3\nn = [8, 16, 32, 64]\nmin_pass = 2\n",
        ExperimentKind::YchainExit => {
            "[ychain-exit]\nr = [2.0, 4.0, 8.0, 16.0]\nreplicas = 300\nsymmetry_samples = 500\nescape_r = [4.0, 8.0]\nescape_replicas = 20\n"
        }
        ExperimentKind::YchainExcursion => {
            "[ychain-excursion]\nn = 2048\na = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0]\nreplicas = 60\n"
        }
        ExperimentKind::Occupation => "[occupation]\nn = [16, 32, 64, 128, 256, 512]\nreplicas = 60\n",
        ExperimentKind::Counterexample => "[counterexample]\nenv_seeds = 2\nepsilon = 0.0078125\nwalks = 400\nmin_pass = 1\n",
    };
    format!("experiment = \"{}\"\nmaster_seed = {seed}\n\n{body}", kind.name())
}
