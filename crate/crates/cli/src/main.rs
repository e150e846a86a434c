use clap::error::{ContextKind, ErrorKind};
use clap::Parser;
use serde_json::json;

use shaping_cli::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => {
                let field = e
                    .get(ContextKind::InvalidArg)
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "args".into());
                let message = e.to_string();
                let first = message
                    .lines()
                    .next()
                    .unwrap_or_default()
                    .trim_start_matches("error: ");
                eprintln!(
                    "{}",
                    json!({"error": "validation", "field": field, "message": first})
                );
                std::process::exit(2);
            }
        },
    };
    let (cmd, params) = cli.command.split();
    match shaping_cli::run(cmd, params) {
        Ok(w) => println!("{}", w.csv.display()),
        Err(e) => {
            eprintln!("{}", e.to_line());
            std::process::exit(e.exit_code());
        }
    }
}
