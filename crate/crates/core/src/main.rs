fn main() -> std::process::ExitCode {
    slab::cli::main()
}
