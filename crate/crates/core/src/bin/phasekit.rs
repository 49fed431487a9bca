fn main() -> std::process::ExitCode {
    phasekit::cli::main()
}
