fn main() -> std::process::ExitCode {
    swor::cli::main()
}
