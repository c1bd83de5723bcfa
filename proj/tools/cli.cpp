#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "njexl/engine.hpp"
#include "njexl/lexer.hpp"
#include "njexl/parser.hpp"

namespace njexl::cli {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

void report(std::ostream& err, const ScriptError& e) { err << describe(*e.info()) << '\n'; }

/// Runs `body` and turns failures into exit code 1.
template <typename Body>
int guarded(std::ostream& err, Body body) {
    try {
        body();
        return 0;
    } catch (const ScriptError& e) {
        report(err, e);
    } catch (const std::exception& e) {
        err << "InternalError: " << e.what() << '\n';
    }
    return 1;
}

int repl(Interpreter& interp, std::istream& in, std::ostream& out, std::ostream& err, bool interactive) {
    std::string buffer;
    std::string line;
    auto prompt = [&] {
        if (interactive) out << (buffer.empty() ? "njexl> " : "  ...> ") << std::flush;
    };
    auto submit = [&] {
        std::string source = std::move(buffer);
        buffer.clear();
        guarded(err, [&] {
            Value v;
            run_with_stack(kDefaultStackBytes,
                           [&] { v = interp.run_source(source, interp.globals(), fs::current_path()); });
            if (!v.is_null()) out << to_display(v) << '\n';
        });
        out.flush();
    };
    for (prompt(); std::getline(in, line); prompt()) {
        if (buffer.empty()) {
            std::string cmd = trim(line);
            if (cmd == ":quit" || cmd == ":q") return 0;
            if (cmd.empty()) continue;
        }
        buffer += line;
        buffer += '\n';
        if (!needs_more_input(buffer)) submit();
    }
    if (!trim(buffer).empty()) submit();
    if (interactive) out << '\n';
    return 0;
}

}  // namespace

bool needs_more_input(const std::string& source) {
    std::vector<Token> tokens;
    try {
        tokens = tokenize(source);
    } catch (const ScriptError& e) {
        return e.kind() == "UnterminatedString" || e.kind() == "UnterminatedComment";
    }
    int depth = 0;
    for (const auto& t : tokens) {
        if (t.is_punct("(") || t.is_punct("[") || t.is_punct("{") || t.is_op("#(")) ++depth;
        if (t.is_punct(")") || t.is_punct("]") || t.is_punct("}")) --depth;
    }
    return depth > 0;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const Options& options) {
    // Everything after the first "--" belongs to the script.
    auto dashes = std::find(args.begin(), args.end(), "--");
    std::vector<std::string> passthrough(dashes == args.end() ? dashes : dashes + 1, args.end());

    CLI::App app{"Run, evaluate and inspect nJexl scripts. Without arguments, starts a REPL.", "njexl"};
    std::string eval_text;
    std::string ast_file;
    std::optional<std::int64_t> seed_clock;
    bool http = false;
    std::vector<std::string> url_maps;
    std::string script;
    std::vector<std::string> script_args;

    auto* eval_opt = app.add_option("--eval", eval_text, "Evaluate source text and print its value");
    auto* ast_opt = app.add_option("--ast", ast_file, "Print the syntax tree of a script file");
    app.add_option("--seed-clock", seed_clock, "Use a fake clock advancing N nanoseconds per sample")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--http", http, "Allow http:// and https:// locations in read() and lines()");
    app.add_option("--map-url", url_maps, "Serve URL from a local file instead of the network")
        ->type_name("URL=PATH");
    eval_opt->excludes(ast_opt);
    auto* run_cmd = app.add_subcommand("run", "Run a script file");
    run_cmd->add_option("file", script, "Script path")->required();
    run_cmd->add_option("args", script_args, "Arguments exposed to the script as __args__");
    run_cmd->excludes(eval_opt);
    run_cmd->excludes(ast_opt);
    app.require_subcommand(0, 1);

    try {
        std::vector<std::string> reversed(args.begin(), dashes);
        std::reverse(reversed.begin(), reversed.end());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\nrun 'njexl --help' for usage\n";
        return 2;
    }
    const bool running = run_cmd->parsed();
    if (dashes != args.end() && !running) {
        err << "usage error: '--' is only valid after 'run <file>'\n";
        return 2;
    }
    script_args.insert(script_args.end(), passthrough.begin(), passthrough.end());

    auto loader = std::make_shared<ResourceLoader>();
    if (http) {
        loader->register_scheme("http", http_fetcher());
        loader->register_scheme("https", http_fetcher());
    }
    for (const auto& mapping : url_maps) {
        auto eq = mapping.rfind('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == mapping.size()) {
            err << "usage error: --map-url expects URL=PATH, got '" << mapping << "'\n";
            return 2;
        }
        loader->map_url(mapping.substr(0, eq), fs::absolute(mapping.substr(eq + 1)));
    }

    IoPorts io;
    io.out = [&out](std::string_view s) { out.write(s.data(), static_cast<std::streamsize>(s.size())); };
    io.err = [&err](std::string_view s) { err.write(s.data(), static_cast<std::streamsize>(s.size())); };
    io.loader = loader;
    io.clock = seed_clock ? fake_clock(*seed_clock) : steady_clock_ns();
    io.env = options.env;
    Interpreter interp(std::move(io), ModuleRegistry::with_defaults());

    if (!ast_file.empty()) {
        return guarded(err, [&] { out << dump_ast(*parse_source(ResourceLoader::read_file(ast_file))); });
    }
    if (app.count("--eval")) {
        return guarded(err, [&] {
            Value v;
            run_with_stack(kDefaultStackBytes,
                           [&] { v = interp.run_source(eval_text, interp.globals(), fs::current_path()); });
            out << to_display(v) << '\n';
        });
    }
    if (running) {
        return guarded(err, [&] {
            fs::path path = fs::absolute(script);
            auto program = parse_source(ResourceLoader::read_file(path));
            std::vector<Value> argv;
            for (const auto& a : script_args) argv.push_back(Value::str(a));
            interp.globals()->define("__args__", Value::list(std::move(argv)));
            run_with_stack(kDefaultStackBytes,
                           [&] { interp.run_program(program, interp.globals(), path.parent_path()); });
        });
    }
    return repl(interp, in, out, err, options.interactive);
}

}  // namespace njexl::cli
