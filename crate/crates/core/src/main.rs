fn main() -> std::process::ExitCode {
    lessonsgraph::cli::main()
}
