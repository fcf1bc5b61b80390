// The CSV tables the command-line tool writes, built through the library.

use weylchan::config::{Command, ConfigLayer, RunConfig};
use weylchan::figures::run_figure;
use weylchan::Result;

fn run() -> Result<()> {
    let layer = ConfigLayer::from_toml("d = 3\nalpha = 0.5\np_base = 0.85\ngrid = \"0.85:1:0.05\"\n")?;
    let cfg = RunConfig::resolve(Command::Spectrum, layer)?;
    print!("{}", run_figure(&cfg)?.to_csv()?);

    let flags = ConfigLayer {
        alpha: Some(0.4),
        grid: Some("0:1:0.2".into()),
        pair: Some("1:0:2".into()),
        ..Default::default()
    };
    let cfg = RunConfig::resolve(Command::Distance, flags)?;
    print!("{}", run_figure(&cfg)?.to_pretty());
    Ok(())
}

fn main() -> Result<()> {
    run()
}
