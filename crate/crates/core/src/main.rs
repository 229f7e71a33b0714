use std::process::ExitCode;

fn main() -> ExitCode {
    gtl::cli::main()
}
