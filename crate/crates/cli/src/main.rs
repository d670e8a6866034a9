use std::process::ExitCode;

fn main() -> ExitCode {
    let result = ncd_cli::run(std::env::args_os());
    if result.command.is_empty() {
        // clap usage, help or version text
        let text = result.payload["usage"].as_str().unwrap_or_default();
        if result.exit_code == 0 {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
        return ExitCode::from(result.exit_code as u8);
    }
    if let Some(message) = result.payload.get("error").and_then(|e| e.get("message")).and_then(|m| m.as_str()) {
        eprintln!("ncd {}: {message}", result.command);
    }
    println!("{}", result.to_json_string());
    ExitCode::from(result.exit_code as u8)
}
