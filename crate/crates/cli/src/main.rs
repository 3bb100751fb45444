use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fracbound_cli::{exit, run, Args};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG } else { exit::OK });
        }
    };
    match run(&args) {
        Ok(out) => {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            // with the data on stdout, the summary moves to stderr
            let (mut report, data): (Box<dyn Write>, _) = match &out.data {
                Some(d) => (Box::new(stderr.lock()), Some(d)),
                None => (Box::new(stdout.lock()), None),
            };
            for line in &out.report {
                let _ = writeln!(report, "{line}");
            }
            drop(report);
            if let Some(d) = data {
                let _ = stdout.lock().write_all(d);
            }
            ExitCode::from(out.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
