#include "limsup/experiment.hpp"
#include "limsup/approx.hpp"
#include "limsup/dimension.hpp"
#include "limsup/lab.hpp"
#include "limsup/rings.hpp"
#include "limsup/solver.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace limsup {

namespace {

struct CommandInfo {
    Command command;
    const char* name;
    bool stochastic;
};

constexpr CommandInfo kCommands[] = {
    {Command::DimEval, "dim_eval", false},       {Command::DimSearch, "dim_search", false},
    {Command::Solve, "solve", false},            {Command::Certify, "certify", true},
    {Command::MeasureScan, "measure_scan", true}, {Command::BoxDim, "box_dim", false},
    {Command::Series, "series", false},          {Command::Ubiquity, "ubiquity", true},
    {Command::CoveringSum, "covering_sum", false}, {Command::Fixtures, "fixtures", false},
};

enum class KeyType { Text, Int, Rational, RationalList, IntList, Bool, Setting, Ring, Strategy, Policy, Specs };

struct KeySpec {
    const char* name;
    KeyType type;
    bool required;
};

std::vector<KeySpec> key_table(Command c)
{
    std::vector<KeySpec> keys{{"command", KeyType::Text, true}, {"seed", KeyType::Int, is_stochastic(c)},
                              {"budget", KeyType::Int, false}, {"out", KeyType::Text, false}};
    auto add = [&](std::initializer_list<KeySpec> more) { keys.insert(keys.end(), more); };
    switch (c) {
    case Command::DimEval:
        add({{"setting", KeyType::Setting, true}, {"m", KeyType::Int, true}, {"n", KeyType::Int, true},
             {"tau", KeyType::RationalList, true}});
        break;
    case Command::DimSearch:
        add({{"setting", KeyType::Setting, true}, {"m", KeyType::Int, true}, {"n", KeyType::Int, true},
             {"tau", KeyType::RationalList, true}, {"resolution", KeyType::Int, false}});
        break;
    case Command::Solve:
        add({{"ring", KeyType::Ring, true}, {"m", KeyType::Int, true}, {"n", KeyType::Int, true},
             {"gamma", KeyType::RationalList, true}, {"theta", KeyType::RationalList, true},
             {"matrix", KeyType::Text, false}, {"strategy", KeyType::Strategy, false},
             {"right_multiply", KeyType::Bool, false}});
        break;
    case Command::Certify:
        add({{"ring", KeyType::Ring, true}, {"m", KeyType::Int, true}, {"n", KeyType::Int, true},
             {"gamma", KeyType::RationalList, true}, {"theta", KeyType::RationalList, true},
             {"trials", KeyType::Int, true}, {"policy", KeyType::Policy, false}});
        break;
    case Command::MeasureScan:
        add({{"ring", KeyType::Ring, false}, {"m", KeyType::Int, true}, {"n", KeyType::Int, true},
             {"specs", KeyType::Specs, true}, {"samples", KeyType::Int, true}, {"ladder", KeyType::IntList, true},
             {"tail_starts", KeyType::IntList, false}});
        break;
    case Command::BoxDim:
        add({{"setting", KeyType::Setting, false}, {"m", KeyType::Int, false}, {"n", KeyType::Int, false},
             {"tau", KeyType::RationalList, true}, {"Q", KeyType::Int, true}, {"scales", KeyType::IntList, false}});
        break;
    case Command::Series:
        add({{"m", KeyType::Int, true}, {"n", KeyType::Int, true}, {"tau", KeyType::RationalList, true},
             {"M", KeyType::Int, false}, {"R", KeyType::Int, true}});
        break;
    case Command::Ubiquity:
        add({{"tau", KeyType::RationalList, true}, {"M", KeyType::Int, false}, {"k", KeyType::Int, true},
             {"k_max", KeyType::Int, false}, {"samples", KeyType::Int, false}, {"radius", KeyType::Rational, false},
             {"center", KeyType::RationalList, false}, {"full_window", KeyType::Bool, false}});
        break;
    case Command::CoveringSum:
        add({{"setting", KeyType::Setting, true}, {"m", KeyType::Int, true}, {"n", KeyType::Int, true},
             {"tau", KeyType::RationalList, true}, {"s_lo", KeyType::Rational, true}, {"s_hi", KeyType::Rational, true},
             {"step", KeyType::Rational, false}, {"max_log2", KeyType::Int, false}});
        break;
    case Command::Fixtures: break;
    }
    return keys;
}

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

std::int64_t parse_int(const std::string& s)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        fail(ErrorCode::ParseError, "'" + s + "' is not an integer");
    }
    if (used != s.size())
        fail(ErrorCode::ParseError, "'" + s + "' is not an integer");
    return v;
}

bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1")
        return true;
    if (s == "false" || s == "0")
        return false;
    fail(ErrorCode::ParseError, "'" + s + "' is not a boolean");
}

CertifyPolicy parse_policy(const std::string& s)
{
    if (s == "sound")
        return CertifyPolicy::Sound;
    if (s == "as_stated")
        return CertifyPolicy::AsStated;
    fail(ErrorCode::ParseError, "unknown certify policy '" + s + "'");
}

// "id:tau,tau;id:tau,tau"
std::vector<std::pair<std::string, std::vector<Rational>>> parse_specs(const std::string& s)
{
    std::vector<std::pair<std::string, std::vector<Rational>>> out;
    for (const auto& part : split(s, ';')) {
        auto colon = part.find(':');
        if (colon == std::string::npos || colon == 0)
            fail(ErrorCode::ParseError, "spec '" + part + "' must be id:tau,...");
        out.emplace_back(trim(part.substr(0, colon)), parse_rational_list(part.substr(colon + 1)));
    }
    return out;
}

void check_value(KeyType type, const std::string& v)
{
    switch (type) {
    case KeyType::Text: break;
    case KeyType::Int: parse_int(v); break;
    case KeyType::Rational: parse_rational(v); break;
    case KeyType::RationalList: parse_rational_list(v); break;
    case KeyType::IntList:
        for (const auto& x : split(v, ','))
            parse_int(x);
        break;
    case KeyType::Bool: parse_bool(v); break;
    case KeyType::Setting: parse_setting(v); break;
    case KeyType::Ring: RingDescriptor::parse_token(v); break;
    case KeyType::Strategy: parse_strategy(v); break;
    case KeyType::Policy: parse_policy(v); break;
    case KeyType::Specs: parse_specs(v); break;
    }
}

std::string fmt_double(double x, int digits = 17)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string fmt_fixed(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? sep : "") + parts[i];
    return out;
}

std::string tau_text(const std::vector<Rational>& tau)
{
    std::vector<std::string> parts;
    for (const auto& t : tau)
        parts.push_back(format_rational(t));
    return join(parts, ";");
}

std::vector<PowerProduct> bounds_of(const std::vector<Rational>& values)
{
    std::vector<PowerProduct> out;
    for (const auto& v : values) {
        if (v <= 0)
            fail(ErrorCode::InvalidArgument, "bounds must be positive");
        out.push_back(PowerProduct::of(v));
    }
    return out;
}

ClosedFormCase case_of(const ExperimentConfig& c)
{
    ClosedFormCase out;
    out.setting = parse_setting(c.text_or("setting", "real"));
    out.m = static_cast<int>(c.integer("m"));
    out.n = static_cast<int>(c.integer("n"));
    out.tau = c.rationals("tau");
    out.validate_shape();
    return out;
}

std::uint64_t positive(std::int64_t v, const char* what)
{
    if (v < 1)
        fail(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
    return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------- commands

RunOutput run_dim_eval(const ExperimentConfig& cfg)
{
    auto c = case_of(cfg);
    auto r = closed_form(c);
    std::vector<std::string> argmin;
    for (int k : r.argmin)
        argmin.push_back(std::to_string(k + 1));
    RunOutput out;
    out.artifacts.push_back({"dim_eval.csv", "setting,m,n,tau,value,value_decimal,argmin,hypothesis_violated\n" +
                                                 std::string(setting_name(c.setting)) + "," + std::to_string(c.m) + "," +
                                                 std::to_string(c.n) + "," + tau_text(c.tau) + "," +
                                                 format_rational(r.value) + "," + fmt_double(r.value.get_d(), 12) + "," +
                                                 join(argmin, ";") + "," + (r.hypothesis_violated ? "true" : "false") + "\n"});
    out.summary = "dimension " + format_rational(r.value) + (r.hypothesis_violated ? " (hypothesis violated: full dimension)" : "");
    return out;
}

RunOutput run_dim_search(const ExperimentConfig& cfg)
{
    auto c = case_of(cfg);
    c.require_hypothesis();
    auto cf = closed_form(c);
    auto sel = select_exponents(c);
    auto mt = mtpr_lower_bound(c.problem(sel.a));
    auto grid = grid_optimize_lower_bound(c, static_cast<int>(cfg.integer_or("resolution", 8)));
    std::vector<std::string> a;
    for (const auto& x : sel.a)
        a.push_back(format_rational(x));
    RunOutput out;
    out.artifacts.push_back(
        {"dim_search.csv",
         "setting,m,n,tau,closed_form,selected_a,selection,lower_bound,grid_best,grid_points,box_relaxed,grid_within_closed_form\n" +
             std::string(setting_name(c.setting)) + "," + std::to_string(c.m) + "," + std::to_string(c.n) + "," +
             tau_text(c.tau) + "," + format_rational(cf.value) + "," + join(a, ";") + "," +
             (sel.tag == ExponentCase::BallToRectangle ? "ball_to_rectangle" : "rectangle_to_rectangle") + "," +
             format_rational(mt.value) + "," + format_rational(grid.best) + "," + std::to_string(grid.points) + "," +
             (grid.box_relaxed ? "true" : "false") + "," + (grid.best <= cf.value ? "true" : "false") + "\n"});
    out.summary = "closed form " + format_rational(cf.value) + ", lower bound at selected exponents " + format_rational(mt.value);
    return out;
}

Matrix matrix_of(const ExperimentConfig& cfg, const RingDescriptor& ring, int m, int n)
{
    if (!cfg.has("matrix")) {
        auto seed = cfg.seed();
        if (!seed)
            fail(ErrorCode::MissingRequired, "solve needs either matrix or seed");
        return sample_uniform(ring, m, n, *seed);
    }
    std::string text = ring.token() + " " + std::to_string(m) + " " + std::to_string(n) + "\n";
    for (const auto& e : split(cfg.text("matrix"), ';'))
        text += e + "\n";
    return parse_matrix(text).second;
}

RunOutput run_solve(const ExperimentConfig& cfg)
{
    auto ring = RingDescriptor::parse_token(cfg.text("ring"));
    int m = static_cast<int>(cfg.integer("m")), n = static_cast<int>(cfg.integer("n"));
    LinearFormSystem sys;
    sys.ring = ring;
    sys.A = matrix_of(cfg, ring, m, n);
    sys.error_bounds = bounds_of(cfg.rationals("gamma"));
    sys.height_bounds = bounds_of(cfg.rationals("theta"));
    sys.right_multiply = cfg.has("right_multiply") && cfg.flag("right_multiply");
    sys.budget = effective_budget(cfg);
    auto strategy = parse_strategy(cfg.text_or("strategy", "first_found"));
    auto rec = solve(sys, strategy);
    if (rec.status == SolveStatus::SearchExhausted)
        fail(ErrorCode::BudgetExceeded, "search stopped after " + std::to_string(rec.examined) + " candidates");
    RunOutput out;
    out.artifacts.push_back({"solve.csv", solution_csv_header(m, n) + "\n" + format_solution_csv(rec, ring) + "\n"});
    out.artifacts.push_back({"matrix.txt", format_matrix(sys.A, ring)});
    out.summary = std::string(status_name(rec.status)) + " after " + std::to_string(rec.examined) + " candidates";
    return out;
}

RunOutput run_certify(const ExperimentConfig& cfg)
{
    auto ring = RingDescriptor::parse_token(cfg.text("ring"));
    int m = static_cast<int>(cfg.integer("m")), n = static_cast<int>(cfg.integer("n"));
    auto policy = parse_policy(cfg.text_or("policy", "sound"));
    int trials = static_cast<int>(positive(cfg.integer("trials"), "trials"));
    auto rep = certify_minkowski(ring, m, n, bounds_of(cfg.rationals("gamma")), bounds_of(cfg.rationals("theta")), trials,
                                 *cfg.seed(), policy);
    std::vector<std::string> failures;
    for (int f : rep.failures)
        failures.push_back(std::to_string(f));
    RunOutput out;
    out.artifacts.push_back({"certify.csv", "ring,m,n,policy,trials,found,examined,certified,failures\n" + ring.token() + "," +
                                                std::to_string(m) + "," + std::to_string(n) + "," + cfg.text_or("policy", "sound") +
                                                "," + std::to_string(rep.trials) + "," + std::to_string(rep.found) + "," +
                                                std::to_string(rep.examined) + "," + (rep.certified() ? "true" : "false") +
                                                "," + join(failures, ";") + "\n"});
    out.summary = std::to_string(rep.found) + "/" + std::to_string(rep.trials);
    return out;
}

RunOutput run_measure_scan(const ExperimentConfig& cfg)
{
    DichotomyScan scan;
    scan.ring = RingDescriptor::parse_token(cfg.text_or("ring", "real@32"));
    int m = static_cast<int>(cfg.integer("m")), n = static_cast<int>(cfg.integer("n"));
    for (auto& [id, tau] : parse_specs(cfg.text("specs")))
        scan.specs.push_back({id, ApproxSpec::power_law(m, n, tau)});
    scan.samples = positive(cfg.integer("samples"), "samples");
    for (auto h : cfg.integers("ladder"))
        scan.ladder.push_back(positive(h, "ladder heights"));
    if (cfg.has("tail_starts"))
        for (auto h : cfg.integers("tail_starts"))
            scan.tail_starts.push_back(positive(h, "tail starts"));
    scan.seed = *cfg.seed();
    scan.budget = effective_budget(cfg);
    auto rows = measure_scan(scan);
    std::string csv = "spec_id,H,hits,N,fraction,ci_lo,ci_hi\n", dat;
    std::string current;
    for (const auto& r : rows) {
        csv += r.spec_id + "," + std::to_string(r.H) + "," + std::to_string(r.hits) + "," + std::to_string(r.N) + "," +
               fmt_fixed(r.fraction) + "," + fmt_fixed(r.ci_lo) + "," + fmt_fixed(r.ci_hi) + "\n";
        if (r.spec_id != current) {
            dat += (current.empty() ? "" : "\n\n") + std::string("# ") + r.spec_id + "\n";
            current = r.spec_id;
        }
        dat += std::to_string(r.H) + " " + fmt_fixed(r.fraction) + "\n";
    }
    RunOutput out;
    out.artifacts.push_back({"measure_scan.csv", csv});
    out.artifacts.push_back({"measure_scan.dat", dat});
    out.summary = std::to_string(rows.size()) + " rows over " + std::to_string(scan.samples) + " samples";
    return out;
}

RunOutput run_box_dim(const ExperimentConfig& cfg)
{
    ClosedFormCase c;
    c.setting = parse_setting(cfg.text_or("setting", "twodim"));
    c.m = static_cast<int>(cfg.integer_or("m", 1));
    c.n = static_cast<int>(cfg.integer_or("n", c.setting == Setting::TwoDim ? 2 : 1));
    c.tau = cfg.rationals("tau");
    std::vector<int> scales;
    if (cfg.has("scales"))
        for (auto k : cfg.integers("scales"))
            scales.push_back(static_cast<int>(k));
    auto est = box_count_dimension(c, positive(cfg.integer("Q"), "Q"), scales, effective_budget(cfg));
    std::string csv = "eps,count,log_eps,log_count,slope,residual\n", dat = "# log(1/eps) log(count)\n";
    for (std::size_t i = 0; i < est.counts.size(); ++i) {
        csv += "2^-" + std::to_string(est.exponents[i]) + "," + std::to_string(est.counts[i]) + "," +
               fmt_double(est.log_eps[i], 12) + "," + fmt_double(est.log_count[i], 12) + "," + fmt_double(est.slope, 12) +
               "," + fmt_double(est.residual, 12) + "\n";
        dat += fmt_double(-est.log_eps[i], 12) + " " + fmt_double(est.log_count[i], 12) + "\n";
    }
    RunOutput out;
    out.artifacts.push_back({"box_dim.csv", csv});
    out.artifacts.push_back({"box_dim.dat", dat});
    out.summary = "slope " + fmt_double(est.slope, 6) + " over " + std::to_string(est.counts.size()) + " scales";
    if (c.hypothesis_holds())
        out.summary += ", closed form " + format_rational(closed_form(c).value);
    return out;
}

RunOutput run_series(const ExperimentConfig& cfg)
{
    auto spec = ApproxSpec::power_law(static_cast<int>(cfg.integer("m")), static_cast<int>(cfg.integer("n")),
                                      cfg.rationals("tau"), positive(cfg.integer_or("M", 2), "M"));
    auto R = positive(cfg.integer("R"), "R");
    auto s = series_partial_sums(spec, R);
    RunOutput out;
    out.artifacts.push_back({"series.csv", "R,exact,direct,condensed,direct_approx,condensed_approx\n" + std::to_string(R) +
                                               "," + (s.exact ? "true" : "false") + "," +
                                               (s.exact ? format_rational(s.direct) : "") + "," +
                                               (s.exact ? format_rational(s.condensed) : "") + "," +
                                               fmt_double(static_cast<double>(s.direct_approx), 15) + "," +
                                               fmt_double(static_cast<double>(s.condensed_approx), 15) + "\n"});
    out.summary = "direct " + fmt_double(static_cast<double>(s.direct_approx), 10) + ", condensed " +
                  fmt_double(static_cast<double>(s.condensed_approx), 10);
    return out;
}

RunOutput run_ubiquity(const ExperimentConfig& cfg)
{
    auto spec = ApproxSpec::power_law(1, 2, cfg.rationals("tau"), positive(cfg.integer_or("M", 2), "M"),
                                      static_cast<int>(cfg.integer_or("k_max", std::max<std::int64_t>(10, cfg.integer("k")))));
    auto rho = balance_rho_real(spec);
    UbiquityOptions opt;
    opt.k = static_cast<int>(cfg.integer("k"));
    opt.samples = positive(cfg.integer_or("samples", 4000), "samples");
    opt.seed = *cfg.seed();
    opt.radius = cfg.rational_or("radius", Rational(1, 4));
    if (cfg.has("center"))
        opt.center = cfg.rationals("center");
    opt.full_window = cfg.has("full_window") && cfg.flag("full_window");
    auto rep = empirical_ubiquity_check(spec, rho, opt);
    std::string rho_text;
    for (std::size_t i = 0; i < rep.rho.size(); ++i)
        rho_text += (i ? "," : "") + fmt_double(static_cast<double>(rep.rho[i]), 12);
    RunOutput out;
    out.artifacts.push_back({"ubiquity.csv", "k,q_lo,q_hi,samples,covered,fraction,rho1,rho2,meets_half\n" +
                                                 std::to_string(opt.k) + "," + std::to_string(rep.q_lo) + "," +
                                                 std::to_string(rep.q_hi) + "," + std::to_string(rep.samples) + "," +
                                                 std::to_string(rep.covered) + "," + fmt_fixed(rep.fraction) + "," + rho_text +
                                                 "," + (rep.meets(Rational(1, 2)) ? "true" : "false") + "\n"});
    out.summary = "covered " + std::to_string(rep.covered) + "/" + std::to_string(rep.samples);
    return out;
}

RunOutput run_covering_sum(const ExperimentConfig& cfg)
{
    auto c = case_of(cfg);
    auto r = covering_sum(c, cfg.rational("s_lo"), cfg.rational("s_hi"), cfg.rational_or("step", Rational(1, 20)),
                          static_cast<int>(cfg.integer_or("max_log2", 16)));
    std::string csv = "s,Q,partial_sum\n", dat = "# s partial_sum_at_top_Q\n";
    for (const auto& row : r.rows)
        csv += format_rational(row.s) + "," + std::to_string(row.Q) + "," + fmt_double(static_cast<double>(row.partial_sum), 15) + "\n";
    for (std::size_t i = 0, per = r.rows.size() / std::max<std::size_t>(1, r.grid.size()); i < r.grid.size(); ++i)
        dat += fmt_double(r.grid[i].get_d(), 6) + " " +
               fmt_double(static_cast<double>(r.rows[(i + 1) * per - 1].partial_sum), 15) + "\n";
    RunOutput out;
    out.artifacts.push_back({"covering_sum.csv", csv});
    out.artifacts.push_back({"covering_sum.dat", dat});
    out.summary = "critical exponent " + format_rational(r.critical) + ", last growing " +
                  (r.last_growing ? format_rational(*r.last_growing) : "none") + ", first flat " +
                  (r.first_flat ? format_rational(*r.first_flat) : "none");
    return out;
}

RunOutput run_fixtures()
{
    RunOutput out;
    out.artifacts = fixture_suite();
    out.summary = std::to_string(out.artifacts.size()) + " fixture files";
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            fail(ErrorCode::IoError, "cannot write " + tmp.string());
        os << content;
        os.flush();
        if (!os)
            fail(ErrorCode::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::IoError, "cannot rename into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        fail(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string utc_now()
{
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

const char* command_name(Command c)
{
    for (const auto& info : kCommands)
        if (info.command == c)
            return info.name;
    return "?";
}

Command parse_command(const std::string& name)
{
    for (const auto& info : kCommands)
        if (name == info.name)
            return info.command;
    fail(ErrorCode::ParseError, "unknown command '" + name + "'");
}

bool is_stochastic(Command c)
{
    for (const auto& info : kCommands)
        if (info.command == c)
            return info.stochastic;
    return false;
}

const std::string& ExperimentConfig::text(const std::string& key) const
{
    auto it = values.find(key);
    if (it == values.end())
        fail(ErrorCode::MissingRequired, "missing key '" + key + "'");
    return it->second;
}

std::string ExperimentConfig::text_or(const std::string& key, const std::string& fallback) const
{
    return has(key) ? text(key) : fallback;
}

std::int64_t ExperimentConfig::integer(const std::string& key) const { return parse_int(text(key)); }
std::int64_t ExperimentConfig::integer_or(const std::string& key, std::int64_t fallback) const
{
    return has(key) ? integer(key) : fallback;
}
Rational ExperimentConfig::rational(const std::string& key) const { return parse_rational(text(key)); }
Rational ExperimentConfig::rational_or(const std::string& key, const Rational& fallback) const
{
    return has(key) ? rational(key) : fallback;
}
std::vector<Rational> ExperimentConfig::rationals(const std::string& key) const { return parse_rational_list(text(key)); }
std::vector<std::int64_t> ExperimentConfig::integers(const std::string& key) const
{
    std::vector<std::int64_t> out;
    for (const auto& x : split(text(key), ','))
        out.push_back(parse_int(x));
    return out;
}
bool ExperimentConfig::flag(const std::string& key) const { return parse_bool(text(key)); }

std::optional<std::uint64_t> ExperimentConfig::seed() const
{
    if (!has("seed"))
        return std::nullopt;
    auto v = integer("seed");
    if (v < 0)
        fail(ErrorCode::InvalidArgument, "seed must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

ExperimentConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides)
{
    std::map<std::string, std::string> raw;
    std::map<std::string, int> line_of;
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#')
            continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ParseError, "line " + std::to_string(number) + ": expected key=value");
        std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        if (key.empty())
            fail(ErrorCode::ParseError, "line " + std::to_string(number) + ": empty key");
        if (raw.count(key))
            fail(ErrorCode::ParseError, "line " + std::to_string(number) + ": duplicate key '" + key + "'");
        raw[key] = value;
        line_of[key] = number;
    }
    for (const auto& [key, value] : overrides) {
        if (key == "command" && raw.count(key) && raw[key] != value)
            fail(ErrorCode::InvalidArgument, "config is for '" + raw[key] + "', not '" + value + "'");
        raw[key] = value;
        line_of.erase(key);
    }
    if (!raw.count("command"))
        fail(ErrorCode::MissingRequired, "missing key 'command'");

    ExperimentConfig cfg;
    cfg.command = parse_command(raw["command"]);
    auto table = key_table(cfg.command);
    for (const auto& [key, value] : raw) {
        auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return key == k.name; });
        auto where = line_of.count(key) ? "line " + std::to_string(line_of[key]) + ": " : std::string("override: ");
        if (it == table.end())
            fail(ErrorCode::UnknownKey, where + "unknown key '" + key + "' for " + command_name(cfg.command));
        try {
            check_value(it->type, value);
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, where + key + ": " + e.what());
        }
    }
    for (const auto& k : table)
        if (k.required && !raw.count(k.name))
            fail(ErrorCode::MissingRequired, std::string("missing key '") + k.name + "' for " + command_name(cfg.command));
    cfg.values = raw;
    for (const auto& [key, value] : raw)
        cfg.source += key + "=" + value + "\n";
    return cfg;
}

std::uint64_t effective_budget(const ExperimentConfig& config)
{
    if (const char* env = std::getenv(kBudgetEnv); env && *env) {
        std::int64_t v = 0;
        try {
            v = parse_int(trim(env));
        } catch (const Error&) {
            fail(ErrorCode::InvalidArgument, std::string(kBudgetEnv) + " must be a nonnegative integer");
        }
        if (v < 0)
            fail(ErrorCode::InvalidArgument, std::string(kBudgetEnv) + " must be a nonnegative integer");
        return static_cast<std::uint64_t>(v);
    }
    auto v = config.integer_or("budget", 0);
    if (v < 0)
        fail(ErrorCode::InvalidArgument, "budget must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

RunOutput run_experiment(const ExperimentConfig& config)
{
    switch (config.command) {
    case Command::DimEval: return run_dim_eval(config);
    case Command::DimSearch: return run_dim_search(config);
    case Command::Solve: return run_solve(config);
    case Command::Certify: return run_certify(config);
    case Command::MeasureScan: return run_measure_scan(config);
    case Command::BoxDim: return run_box_dim(config);
    case Command::Series: return run_series(config);
    case Command::Ubiquity: return run_ubiquity(config);
    case Command::CoveringSum: return run_covering_sum(config);
    case Command::Fixtures: return run_fixtures();
    }
    fail(ErrorCode::InvalidArgument, "unhandled command");
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::HypothesisViolated:
    case ErrorCode::PreconditionUnmet: return 2;
    case ErrorCode::BudgetExceeded: return 3;
    default: return 1;
    }
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        fail(ErrorCode::IoError, "sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

void write_artifacts(const std::filesystem::path& dir, const RunOutput& out, const ExperimentConfig& config)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail(ErrorCode::IoError, "cannot create " + dir.string());
    nlohmann::json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["tool"] = "limsup-lab";
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = command_name(config.command);
    manifest["config_sha256"] = sha256_hex(config.source);
    manifest["config"] = config.source;
    if (auto s = config.seed())
        manifest["seed"] = *s;
    manifest["created_utc"] = utc_now();
    manifest["outputs"] = nlohmann::json::array();
    for (const auto& a : out.artifacts) {
        write_atomic(dir / a.name, a.content);
        manifest["outputs"].push_back({{"file", a.name}, {"sha256", sha256_hex(a.content)}, {"bytes", a.content.size()}});
    }
    manifest["summary"] = out.summary;
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

bool verify_manifest(const std::filesystem::path& dir)
{
    auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    if (manifest.value("config_sha256", "") != sha256_hex(manifest.value("config", "")))
        return false;
    for (const auto& o : manifest.at("outputs")) {
        auto path = dir / o.at("file").get<std::string>();
        if (!std::filesystem::exists(path) || sha256_hex(read_file(path)) != o.at("sha256").get<std::string>())
            return false;
    }
    return true;
}

// ---------------------------------------------------------------- fixtures

std::vector<Artifact> fixture_suite()
{
    std::string dims = "setting,m,n,tau,value\n";
    auto dim = [&](Setting s, int m, int n, std::vector<Rational> tau) {
        ClosedFormCase c{s, m, n, tau};
        dims += std::string(setting_name(s)) + "," + std::to_string(m) + "," + std::to_string(n) + "," + tau_text(tau) + "," +
                format_rational(closed_form(c).value) + "\n";
    };
    dim(Setting::Padic, 2, 1, {Rational(4)});
    dim(Setting::TwoDim, 1, 2, {Rational(3), Rational(2)});
    dim(Setting::TwoDim, 1, 2, {Rational(2), Rational(1)});
    dim(Setting::Real, 1, 1, {Rational(2)});
    for (int t = 2; t <= 5; ++t)
        dim(Setting::Complex, 1, 1, {Rational(t)});

    std::string lower = "delta,kappa,a,t,value\n";
    auto low = [&](DimensionProblem p) {
        lower += tau_text(p.delta) + "," + format_rational(p.kappa) + "," + tau_text(p.a) + "," + tau_text(p.t) + "," +
                 format_rational(mtpr_lower_bound(p).value) + "\n";
    };
    low({{Rational(1), Rational(1)}, Rational(0), {Rational(3, 2), Rational(3, 2)}, {Rational(3, 2), Rational(1, 2)}});
    low({{Rational(2)}, Rational(1, 2), {Rational(3)}, {Rational(1)}});

    std::string select = "setting,m,n,tau,selection,a\n";
    auto sel = [&](Setting s, int m, int n, std::vector<Rational> tau) {
        ClosedFormCase c{s, m, n, tau};
        auto e = select_exponents(c);
        select += std::string(setting_name(s)) + "," + std::to_string(m) + "," + std::to_string(n) + "," + tau_text(tau) + "," +
                  (e.tag == ExponentCase::BallToRectangle ? "ball_to_rectangle" : "rectangle_to_rectangle") + "," +
                  tau_text(e.a) + "\n";
    };
    sel(Setting::Padic, 2, 1, {Rational(4)});
    sel(Setting::Real, 2, 2, {Rational(4), Rational(1, 2)});

    std::string counts = "ring,m,height,count\n";
    auto count = [&](const RingDescriptor& r, int m, long h) {
        counts += r.token() + "," + std::to_string(m) + "," + std::to_string(h) + "," +
                  count_shell(r, m, Rational(h), CountMode::Exact).get_str() + "\n";
    };
    for (int m = 1; m <= 2; ++m)
        for (long Q = 1; Q <= 5; ++Q)
            count(RingDescriptor::complex(), m, Q);
    for (std::uint64_t t : {2, 3})
        for (int m = 1; m <= 2; ++m)
            for (unsigned long r = 0; r <= 3; ++r)
                count(RingDescriptor::laurent(t), m, to_int64(integer_pow(t, r)));

    std::string units = "a2,b2,c2,d2\n";
    for (const auto& u : hurwitz_units())
        units += std::to_string(u.c[0]) + "," + std::to_string(u.c[1]) + "," + std::to_string(u.c[2]) + "," +
                 std::to_string(u.c[3]) + "\n";

    std::string solves = solution_csv_header(1, 1) + ",case\n";
    auto real_one = [](const Rational& x) {
        Matrix A;
        A.rows = A.cols = 1;
        A.entries.push_back(AmbientPoint::from_rationals(RingDescriptor::real(32), {x}));
        return A;
    };
    {
        LinearFormSystem sys;
        sys.ring = RingDescriptor::real(32);
        sys.A = real_one(parse_rational("1.6180339887"));
        sys.error_bounds = {PowerProduct::of(Rational(1, 5))};
        sys.height_bounds = {PowerProduct::of(5)};
        solves += format_solution_csv(solve(sys, Strategy::FirstFound), sys.ring) + ",golden_first_found\n";
        solves += format_solution_csv(solve(sys, Strategy::MinError), sys.ring) + ",golden_min_error\n";
        LinearFormSystem cx;
        cx.ring = RingDescriptor::complex(32);
        cx.A.rows = cx.A.cols = 1;
        cx.A.entries.push_back(AmbientPoint::from_rationals(cx.ring, {Rational(1, 2), Rational(1, 2)}));
        cx.error_bounds = {PowerProduct::of(Rational(3, 5))};
        cx.height_bounds = {PowerProduct::of(1)};
        solves += format_solution_csv(solve(cx, Strategy::FirstFound), cx.ring) + ",complex_half\n";
    }

    std::string member = "x1,x2,tau,H,hit,hit_shells,last_hit_height\n";
    {
        Matrix X;
        X.rows = 1;
        X.cols = 2;
        for (const char* v : {"0.41421356237", "0.73205080757"})
            X.entries.push_back(AmbientPoint::from_rationals(RingDescriptor::real(32), {parse_rational(v)}));
        MembershipQuery q{RingDescriptor::real(32), X, ApproxSpec::power_law(1, 2, {Rational(2), Rational(2)}), Rational(50), 0};
        LinearFormSystem sys;
        sys.ring = q.ring;
        sys.A = X;
        sys.height_bounds = {PowerProduct::of(50)};
        sys.shell_bounds = shell_bounds_of(q.spec);
        auto s = PreparedSearch(sys).scan(X);
        member += "0.41421356237,0.73205080757,2,50," + std::string(s.any ? "true" : "false") + "," +
                  std::to_string(s.hit_shells) + "," + (s.any ? format_rational(s.last) : "") + "\n";
    }

    std::string hurwitz = "x,nearest_doubled\n";
    {
        auto x = AmbientPoint::from_rationals(RingDescriptor::quaternion(32),
                                              {Rational(2, 5), Rational(2, 5), Rational(2, 5), Rational(2, 5)});
        auto z = nearest_hurwitz(x);
        hurwitz += "2/5;2/5;2/5;2/5," + std::to_string(z.c[0]) + ";" + std::to_string(z.c[1]) + ";" + std::to_string(z.c[2]) +
                   ";" + std::to_string(z.c[3]) + "\n";
    }

    std::string covering = "setting,m,n,tau,critical\n";
    for (auto c : {ClosedFormCase{Setting::TwoDim, 1, 2, {Rational(3), Rational(2)}},
                   ClosedFormCase{Setting::Padic, 2, 1, {Rational(4)}}}) {
        auto r = covering_sum(c, Rational(1), Rational(1), Rational(1, 20), 4);
        covering += std::string(setting_name(c.setting)) + "," + std::to_string(c.m) + "," + std::to_string(c.n) + "," +
                    tau_text(c.tau) + "," + format_rational(r.critical) + "\n";
    }

    return {{"closed_forms.csv", dims},       {"lower_bounds.csv", lower},   {"exponent_selection.csv", select},
            {"shell_counts.csv", counts},     {"hurwitz_units.csv", units},  {"nearest_hurwitz.csv", hurwitz},
            {"solutions.csv", solves},        {"membership.csv", member},    {"covering_critical.csv", covering}};
}

void emit_fixture_suite(const std::filesystem::path& dir)
{
    ExperimentConfig cfg;
    cfg.command = Command::Fixtures;
    cfg.source = "command=fixtures\n";
    RunOutput out;
    out.artifacts = fixture_suite();
    out.summary = std::to_string(out.artifacts.size()) + " fixture files";
    write_artifacts(dir, out, cfg);
}

} // namespace limsup
