fn main() -> std::process::ExitCode {
    hhbounds::cli::main()
}
