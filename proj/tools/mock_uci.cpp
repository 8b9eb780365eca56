// Deterministic UCI engine for exercising the client over real pipes.

#include <transcend/engine/mock_engine.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"Mock UCI engine"};
    std::string fault = "none";
    std::uint64_t salt = 0;
    app.add_option("--fault", fault, "none, illegal, silent or crash")
        ->check(CLI::IsMember({"none", "illegal", "silent", "crash"}));
    app.add_option("--salt", salt, "tie-break hash salt");
    CLI11_PARSE(app, argc, argv);

    using transcend::engine::MockFault;
    transcend::engine::MockEngineOptions opt;
    opt.fault = fault == "illegal" ? MockFault::IllegalMove
        : fault == "silent"        ? MockFault::Silent
        : fault == "crash"         ? MockFault::Crash
                                   : MockFault::None;
    opt.salt = salt;
    transcend::engine::MockEngine engine(opt);

    std::string line;
    while (std::getline(std::cin, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        for (const auto& reply : engine.handle(line))
            std::cout << reply << '\n';
        std::cout.flush();
        if (engine.crashed())
            return 1;
        if (line == "quit")
            return 0;
    }
    return 0;
}
