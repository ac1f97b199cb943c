#include "limsup.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int report(limsup_status st)
{
    std::fprintf(stderr, "limsup-lab: %s: %s\n", limsup_status_name(st), limsup_last_error());
    return limsup_exit_code(st);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Experiments on weighted limsup sets of linear forms"};
    app.set_version_flag("--version", limsup_version());

    std::string command, config_path, out_dir;
    std::uint64_t seed = 0;
    app.add_option("command", command, "dim_eval, dim_search, solve, certify, measure_scan, box_dim, series, ubiquity, "
                                       "covering_sum or fixtures")
        ->required();
    auto* config_opt = app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "seed, overrides the config");
    auto* out_opt = app.add_option("--out", out_dir, "output directory (default: config 'out' or ./limsup-out)");
    app.footer("Environment: LIMSUP_LAB_BUDGET overrides the config budget (evaluation cap, 0 = none).\n"
               "Exit codes: 0 ok, 1 error, 2 hypothesis or precondition unmet, 3 budget exhausted.");
    CLI11_PARSE(app, argc, argv);

    if (command == "fixtures" && !*config_opt) {
        std::string dir = *out_opt ? out_dir : "limsup-out";
        if (auto st = limsup_emit_fixtures(dir.c_str()); st != LIMSUP_OK)
            return report(st);
        std::printf("fixtures written to %s\n", dir.c_str());
        return 0;
    }
    if (!*config_opt) {
        std::fprintf(stderr, "limsup-lab: --config is required\n");
        return 1;
    }

    std::ifstream is(config_path);
    std::stringstream text;
    text << is.rdbuf();

    std::vector<std::string> keys{"command"}, values{command};
    if (*seed_opt) {
        keys.push_back("seed");
        values.push_back(std::to_string(seed));
    }
    std::vector<const char*> kp, vp;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        kp.push_back(keys[i].c_str());
        vp.push_back(values[i].c_str());
    }

    limsup_config* cfg = nullptr;
    if (auto st = limsup_config_parse(text.str().c_str(), kp.data(), vp.data(), kp.size(), &cfg); st != LIMSUP_OK)
        return report(st);
    if (!*out_opt) {
        const char* from_config = limsup_config_get(cfg, "out");
        out_dir = from_config ? from_config : "limsup-out";
    }

    limsup_result* res = nullptr;
    auto st = limsup_run(cfg, &res);
    if (st == LIMSUP_OK)
        st = limsup_result_write(res, cfg, out_dir.c_str());
    int code = 0;
    if (st == LIMSUP_OK)
        std::printf("%s: %s (written to %s)\n", limsup_config_command(cfg), limsup_result_summary(res), out_dir.c_str());
    else
        code = report(st);
    limsup_result_free(res);
    limsup_config_free(cfg);
    return code;
}
