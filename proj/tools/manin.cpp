#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manin/constants.hpp"
#include "manin/enumeration.hpp"
#include "manin/qfield.hpp"
#include "manin/surfaces.hpp"
#include "manin/torsor.hpp"

using json = nlohmann::json;
using namespace manin;

namespace {

struct OutputSink {
    std::string path;  // empty = stdout

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << text;
    }
};

SurfaceId parse_surface(const std::string& s, bool torsor_needed) {
    auto id = surface_from_name(s);
    if (!id) throw CLI::ValidationError("--surface", "unknown surface " + s);
    if (torsor_needed && (*id == SurfaceId::S0))
        throw CLI::ValidationError("--surface", "no torsor data for s0");
    return *id;
}

FieldCtx make_field(long d) {
    try {
        return FieldCtx(Int(d));
    } catch (const std::domain_error& e) {
        throw CLI::ValidationError("--field", e.what());
    }
}

Rat parse_bound(const std::string& s) {
    Rat b;
    try {
        b = parse_rat(s);
    } catch (...) {
        throw CLI::ValidationError("--bound", "expected an integer or fraction p/q");
    }
    if (b < 0) throw CLI::ValidationError("--bound", "bound must be nonnegative");
    return b;
}

std::string csv_escape_free(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact point counts and predicted constants for four singular quartic del Pezzo "
                 "surfaces over imaginary quadratic fields"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "worker thread cap")->capture_default_str();

    // ---- count ----
    auto* cmd_count = app.add_subcommand("count", "count rational points of bounded height");
    std::string c_surface, c_bound = "1", c_method = "torsor", c_out, c_format = "csv";
    long c_field = -1;
    cmd_count->add_option("--surface", c_surface, "s1|s2|s3|s4")->required();
    cmd_count->add_option("--field", c_field, "squarefree negative d of K = Q(sqrt d)")->required();
    cmd_count->add_option("--bound", c_bound, "height bound B (integer or p/q)")->required();
    cmd_count->add_option("--method", c_method, "torsor|direct|both")->capture_default_str();
    cmd_count->add_option("--out", c_out, "output file (default stdout)");
    cmd_count->add_option("--format", c_format, "csv|json")->capture_default_str();

    // ---- constants ----
    auto* cmd_const = app.add_subcommand("constants", "evaluate the predicted leading constant");
    std::string k_surface, k_out, k_format = "csv";
    long k_field = -1;
    long long k_prime_bound = 100000;
    unsigned long long k_samples = 1000000, k_seed = 1;
    cmd_const->add_option("--surface", k_surface, "s1|s2|s3|s4")->required();
    cmd_const->add_option("--field", k_field)->required();
    cmd_const->add_option("--prime-bound", k_prime_bound, "Euler product cutoff")->capture_default_str();
    cmd_const->add_option("--samples", k_samples, "Monte Carlo samples")->capture_default_str();
    cmd_const->add_option("--seed", k_seed, "RNG seed")->capture_default_str();
    cmd_const->add_option("--out", k_out);
    cmd_const->add_option("--format", k_format, "csv|json")->capture_default_str();

    // ---- compare ----
    auto* cmd_cmp = app.add_subcommand("compare", "counts against the predicted growth");
    std::string m_surface, m_bounds, m_out, m_format = "csv";
    long m_field = -1;
    long long m_prime_bound = 100000;
    unsigned long long m_samples = 1000000, m_seed = 1;
    cmd_cmp->add_option("--surface", m_surface)->required();
    cmd_cmp->add_option("--field", m_field)->required();
    cmd_cmp->add_option("--bounds", m_bounds, "comma-separated height bounds")->required();
    cmd_cmp->add_option("--prime-bound", m_prime_bound)->capture_default_str();
    cmd_cmp->add_option("--samples", m_samples)->capture_default_str();
    cmd_cmp->add_option("--seed", m_seed)->capture_default_str();
    cmd_cmp->add_option("--out", m_out);
    cmd_cmp->add_option("--format", m_format, "csv|json")->capture_default_str();

    // ---- lines ----
    auto* cmd_lines = app.add_subcommand("lines", "print the lines on a surface as JSON");
    std::string l_surface, l_out;
    long l_field = -1;
    std::string l_height = "20";
    cmd_lines->add_option("--surface", l_surface)->required();
    cmd_lines->add_option("--field", l_field)->capture_default_str();
    cmd_lines->add_option("--search-height", l_height)->capture_default_str();
    cmd_lines->add_option("--out", l_out);

    // ---- selftest ----
    auto* cmd_self = app.add_subcommand("selftest", "run the torsor/direct cross-oracle suite");
    bool s_quick = false;
    cmd_self->add_flag("--quick", s_quick, "reduced grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*cmd_count) {
            SurfaceId id = parse_surface(c_surface, c_method != "direct");
            FieldCtx K = make_field(c_field);
            Rat B = parse_bound(c_bound);
            if (c_method != "torsor" && c_method != "direct" && c_method != "both")
                throw CLI::ValidationError("--method", "expected torsor|direct|both");
            const SurfaceSpec& S = get_surface(id);
            OutputSink sink{c_out};

            struct Row {
                std::string method;
                long long count;
                double ms;
            };
            std::vector<Row> rows;
            auto timed = [&](const std::string& name, auto&& f) {
                auto t0 = std::chrono::steady_clock::now();
                long long n = f();
                auto t1 = std::chrono::steady_clock::now();
                rows.push_back({name, n, std::chrono::duration<double, std::milli>(t1 - t0).count()});
            };
            if (c_method == "torsor" || c_method == "both")
                timed("torsor", [&] { return torsor_count(id, K, B, threads); });
            if (c_method == "direct" || c_method == "both")
                timed("direct", [&] { return direct_count(K, S, B); });
            if (c_method == "both" && rows[0].count != rows[1].count) {
                std::cerr << "consistency failure: torsor=" << rows[0].count
                          << " direct=" << rows[1].count << "\n";
                return 2;
            }
            if (c_format == "json") {
                json j = json::array();
                for (auto& r : rows)
                    j.push_back({{"surface", surface_name(id)},
                                 {"field_d", c_field},
                                 {"bound", c_bound},
                                 {"method", r.method},
                                 {"count", r.count},
                                 {"elapsed_ms", r.ms}});
                sink.write(j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                os << "surface,field_d,bound,method,count,elapsed_ms\n";
                for (auto& r : rows)
                    os << surface_name(id) << ',' << c_field << ',' << c_bound << ',' << r.method
                       << ',' << r.count << ',' << r.ms << "\n";
                sink.write(os.str());
            }
            return 0;
        }

        if (*cmd_const) {
            SurfaceId id = parse_surface(k_surface, true);
            FieldCtx K = make_field(k_field);
            auto rep = constant_report(id, K, Int(static_cast<long>(k_prime_bound)), k_samples,
                                       k_seed, threads);
            OutputSink sink{k_out};
            if (k_format == "json") {
                json j = {{"surface", surface_name(id)},
                          {"field_d", k_field},
                          {"alpha", rep.alpha},
                          {"alpha_stderr", rep.alpha_stderr},
                          {"theta0", rep.theta0.value},
                          {"theta0_prime_bound", k_prime_bound},
                          {"theta0_tail", rep.theta0.tail_bound},
                          {"omega_inf", rep.omega_inf.value},
                          {"omega_inf_stderr", rep.omega_inf.stderr_},
                          {"c", rep.c},
                          {"seed", k_seed}};
                sink.write(j.dump(2) + "\n");
            } else {
                std::ostringstream os;
                os << "surface,field_d,alpha,theta0,theta0_prime_bound,theta0_tail,omega_inf,"
                      "omega_inf_stderr,c,seed\n";
                os << surface_name(id) << ',' << k_field << ',' << csv_escape_free(rep.alpha) << ','
                   << csv_escape_free(rep.theta0.value) << ',' << k_prime_bound << ','
                   << csv_escape_free(rep.theta0.tail_bound) << ','
                   << csv_escape_free(rep.omega_inf.value) << ','
                   << csv_escape_free(rep.omega_inf.stderr_) << ',' << csv_escape_free(rep.c) << ','
                   << k_seed << "\n";
                sink.write(os.str());
            }
            return 0;
        }

        if (*cmd_cmp) {
            SurfaceId id = parse_surface(m_surface, true);
            FieldCtx K = make_field(m_field);
            std::vector<Rat> bounds;
            std::stringstream ss(m_bounds);
            std::string tok;
            while (std::getline(ss, tok, ',')) bounds.push_back(parse_bound(tok));
            if (bounds.empty()) throw CLI::ValidationError("--bounds", "no bounds given");
            auto rep = constant_report(id, K, Int(static_cast<long>(m_prime_bound)), m_samples,
                                       m_seed, threads);
            OutputSink sink{m_out};
            json jrows = json::array();
            std::ostringstream os;
            os << "surface,field_d,bound,count,ratio,predicted_c\n";
            for (const Rat& B : bounds) {
                long long n = torsor_count(id, K, B, threads);
                double Bd = B.get_d();
                double ratio = (Bd > 1) ? n / (Bd * std::pow(std::log(Bd), 5)) : 0.0;
                os << surface_name(id) << ',' << m_field << ',' << B.get_str() << ',' << n << ','
                   << csv_escape_free(ratio) << ',' << csv_escape_free(rep.c) << "\n";
                jrows.push_back({{"surface", surface_name(id)},
                                 {"field_d", m_field},
                                 {"bound", B.get_str()},
                                 {"count", n},
                                 {"ratio", ratio},
                                 {"predicted_c", rep.c}});
            }
            sink.write(m_format == "json" ? jrows.dump(2) + "\n" : os.str());
            return 0;
        }

        if (*cmd_lines) {
            SurfaceId id = parse_surface(l_surface, false);
            if (id == SurfaceId::S0) throw CLI::ValidationError("--surface", "no line data for s0");
            FieldCtx K = make_field(l_field);
            const SurfaceSpec& S = get_surface(id);
            auto lines = find_lines(K, S, parse_bound(l_height));
            json j;
            j["surface"] = surface_name(id);
            j["field_d"] = l_field;
            j["count"] = lines.size();
            j["lines"] = json::array();
            for (const Line& L : lines) {
                json forms = json::array();
                for (const auto& row : L.cut) {
                    json form = json::array();
                    for (const auto& c : row)
                        form.push_back({{"x", c.x.get_str()}, {"y", c.y.get_str()}});
                    forms.push_back(form);
                }
                j["lines"].push_back({{"cutting_forms", forms}});
            }
            OutputSink sink{l_out};
            sink.write(j.dump(2) + "\n");
            return 0;
        }

        if (*cmd_self) {
            std::vector<SurfaceId> surfaces{SurfaceId::S1, SurfaceId::S2, SurfaceId::S3,
                                            SurfaceId::S4};
            std::vector<long> fields = s_quick ? std::vector<long>{-1, -3} : std::vector<long>{-1, -3, -5};
            std::vector<long> bs = s_quick ? std::vector<long>{1, 2, 5} : std::vector<long>{1, 2, 5, 10, 20};
            bool ok = true;
            for (SurfaceId id : surfaces) {
                for (long d : fields) {
                    FieldCtx Kd = make_field(d);
                    const SurfaceSpec& S = get_surface(id);
                    for (long b : bs) {
                        long long t = torsor_count(id, Kd, Rat(b), threads);
                        long long e = direct_count(Kd, S, Rat(b));
                        bool match = (t == e);
                        ok = ok && match;
                        std::cout << (match ? "ok   " : "FAIL ") << surface_name(id) << " d=" << d
                                  << " B=" << b << " torsor=" << t << " direct=" << e << "\n";
                    }
                }
            }
            return ok ? 0 : 2;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "internal consistency failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
