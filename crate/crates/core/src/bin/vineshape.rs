fn main() -> std::process::ExitCode {
    vineshape::cli::main()
}
