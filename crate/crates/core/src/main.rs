fn main() -> std::process::ExitCode {
    thermoshift::cli::main()
}
