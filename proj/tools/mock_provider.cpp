// Policy provider speaking the POS/MOVE line protocol on stdin/stdout.

#include <transcend/engine/provider.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"Mock policy provider"};
    std::string mode = "random";
    std::string pgn;
    double tau = 1.0;
    std::uint64_t seed = 1;
    app.add_option("--mode", mode, "random, tabular or garbage")->check(CLI::IsMember({"random", "tabular", "garbage"}));
    app.add_option("--pgn", pgn, "corpus for the tabular mode");
    app.add_option("--tau", tau, "sampling temperature for the tabular mode");
    app.add_option("--seed", seed, "random seed");
    CLI11_PARSE(app, argc, argv);

    namespace eng = transcend::engine;
    std::unique_ptr<eng::FunctionChannel> provider;
    try {
        if (mode == "random") {
            provider = eng::random_legal_provider(seed);
        } else if (mode == "garbage") {
            provider = eng::garbage_provider();
        } else {
            std::ifstream in(pgn, std::ios::binary);
            if (!in) {
                std::cerr << "cannot read " << pgn << '\n';
                return 2;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            const auto parsed = transcend::chess::parse_pgn(ss.str());
            provider = eng::tabular_provider(eng::TabularChessPolicy::from_games(parsed.games),
                                             transcend::Temperature(tau), seed);
        }
    } catch (const transcend::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    std::string line;
    while (std::getline(std::cin, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        provider->send(line);
        const auto r = provider->receive(std::chrono::milliseconds(0));
        std::cout << (r.status == eng::ReadStatus::Line ? r.line : "ERROR no reply") << '\n';
        std::cout.flush();
    }
    return 0;
}
