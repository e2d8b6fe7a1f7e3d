fn main() -> std::process::ExitCode {
    mibandsel::cli::main()
}
