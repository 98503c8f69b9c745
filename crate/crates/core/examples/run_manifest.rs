//! Tags a report with the hash of the manifest describing its run. Two runs
//! with equal configuration produce identical JSON.
use slab::config::Config;
use slab::experiments::decay_run;
use slab::experiments::log_radii;
use slab::manifest::{RunManifest, Tagged};

fn report(cfg: &Config) -> slab::Result<String> {
    let d = cfg.get_or("d", 3)?;
    let j = cfg.get_or("j", 1)?;
    let run = decay_run(d, j, cfg.get_or("level", 4)?, &log_radii(-1.0, 2.0, 4))?;
    let mut manifest = RunManifest::new("decay", &cfg.canonical());
    manifest.seeds.insert("seed".into(), 0);
    let tagged = Tagged { manifest_hash: manifest.hash(), body: &run };
    Ok(serde_json::to_string_pretty(&tagged)?)
}

fn main() -> slab::Result<()> {
    let cfg = Config::parse("# decay table\nd = 4\nj = 2\nlevel = 4\n")?;
    let first = report(&cfg)?;
    let second = report(&cfg)?;
    println!("{}", &first[..first.len().min(400)]);
    println!("...\nidentical on rerun: {}", first == second);
    Ok(())
}
