// Command-line driver: batch verification with machine-readable reports,
// plus composition/extraction of coordinate-map data and field dumps.
//
// Exit codes: 0 pass, 1 check failure, 2 usage error, 3 internal error.

#include "n2alg/io.hpp"
#include "n2alg/verify.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace n2alg;

namespace {

int cmd_verify(const VerifyConfig& cfg, const std::string& report_path) {
    VerifyResult result = run_verify(cfg);
    std::cout << summary_text(result);
    std::string path = report_path;
    if (path.empty()) {
        const char* dir = std::getenv("N2ALG_REPORT_DIR");
        if (dir && *dir) {
            std::filesystem::create_directories(dir);
            path = std::string(dir) + "/report.json";
        }
    }
    if (!path.empty()) {
        std::ofstream out(path);
        out << report_to_json(cfg, result).dump(2) << "\n";
        std::cout << "report written to " << path << "\n";
    }
    return result.all_pass() ? 0 : 1;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verifier for N=2 superconformal algebra identities"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "read options from a TOML/INI file with a [verify] section (flags win); "
                   "place the flag before the subcommand");

    // verify
    auto* verify = app.add_subcommand("verify", "run identity suites and write a report");
    VerifyConfig cfg;
    std::string suites_csv = "all";
    std::string range_str = "-4..4";
    std::string report_path;
    bool serial = false;
    verify->add_option("--suites", suites_csv,
                       "comma-separated suites or 'all' (grassmann, delta, ns-relations, "
                       "representations, deformation, fields, group-laws, isomorphism)");
    verify->add_option("--generators", cfg.generators, "Grassmann generator count (1..8)");
    verify->add_option("--window", cfg.window, "series window (6..24)");
    verify->add_option("--weight", cfg.weight, "truncation weight (2..8)");
    verify->add_option("--range", range_str, "index range for algebra sweeps, e.g. -4..4");
    verify->add_option("--seed", cfg.seed, "seed for random fixtures");
    verify->add_option("--report", report_path, "report file (default $N2ALG_REPORT_DIR/report.json)");
    verify->add_flag("--serial", serial, "run sweeps on one thread (reference mode)");

    // compose
    auto* compose = app.add_subcommand("compose", "compose two infinitesimal-data files");
    std::string g_path, h_path, law_str = "N2", locus_str = "zero";
    int compose_weight = 0;
    compose->add_option("left", g_path, "left element (JSON)")->required();
    compose->add_option("right", h_path, "right element (JSON)")->required();
    compose->add_option("--law", law_str, "N2 or N1");
    compose->add_option("--locus", locus_str, "zero or infinity");
    compose->add_option("--weight", compose_weight, "override truncation weight");

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "extract data from a coordinate map");
    std::string map_path, target_str = "e1";
    extract_cmd->add_option("map", map_path, "coordinate map (JSON)")->required();
    extract_cmd->add_option("--target", target_str, "e2-homo, e2-nonhomo or e1");

    // dump-field
    auto* dump_field = app.add_subcommand("dump-field", "print a dictionary field");
    std::string label_str = "mu", flavor_str = "homo";
    int field_window = 8;
    dump_field->add_option("--label", label_str, "vac, mu, tau+, tau-, tau1, tau2, omega");
    dump_field->add_option("--flavor", flavor_str, "homo, nonhomo or one-var");
    dump_field->add_option("--window", field_window, "exponent window");

    // dump-rep
    auto* dump_rep = app.add_subcommand("dump-rep", "print a representation derivation");
    std::string family_str = "homo2", kind_str = "L";
    int rep_index = 0;
    dump_rep->add_option("--family", family_str, "homo2, nonhomo2, n1, n1_ds (s = 3), n2_one_var");
    dump_rep->add_option("--kind", kind_str, "L, J, G+, G-, G1, G2, G");
    dump_rep->add_option("--index", rep_index, "mode index (G kinds: mode = index - 1/2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) {
            cfg.suites.clear();
            std::stringstream ss(suites_csv);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty() && item != "all") cfg.suites.push_back(item);
            auto dots = range_str.find("..");
            if (dots == std::string::npos) throw std::invalid_argument("range must be lo..hi");
            cfg.range_lo = std::stoi(range_str.substr(0, dots));
            cfg.range_hi = std::stoi(range_str.substr(dots + 2));
            cfg.mode = serial ? ExecMode::serial : ExecMode::parallel;
            try {
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            return cmd_verify(cfg, report_path);
        }
        if (compose->parsed()) {
            InfinitesimalData g = infinitesimal_from_json(load_json(g_path));
            InfinitesimalData h = infinitesimal_from_json(load_json(h_path));
            if (compose_weight > 0) {
                if (compose_weight > g.weight || compose_weight > h.weight)
                    throw std::invalid_argument("weight override exceeds the data weights");
                g.weight = h.weight = compose_weight;
                g.A1.resize(compose_weight);  g.A2.resize(compose_weight);
                g.M1.resize(compose_weight);  g.M2.resize(compose_weight);
                h.A1.resize(compose_weight);  h.A2.resize(compose_weight);
                h.M1.resize(compose_weight);  h.M2.resize(compose_weight);
            }
            GroupLaw law = law_str == "N1" ? GroupLaw::N1 : GroupLaw::N2;
            InfinitesimalData out = locus_str == "infinity"
                                        ? compose_at_infinity(g, h, law)
                                        : compose_at_zero(g, h, law);
            std::cout << infinitesimal_to_json(out).dump(2) << "\n";
            return 0;
        }
        if (extract_cmd->parsed()) {
            CoordMap m = coordmap_from_json(load_json(map_path));
            EFlavor flavor = target_str == "e2-homo"      ? EFlavor::e2_homo
                             : target_str == "e2-nonhomo" ? EFlavor::e2_nonhomo
                                                          : EFlavor::e1;
            InfinitesimalData out = extract(m, flavor);
            std::cout << infinitesimal_to_json(out).dump(2) << "\n";
            return 0;
        }
        if (dump_field->parsed()) {
            FieldLabel label;
            if (label_str == "vac") label = FieldLabel::vac;
            else if (label_str == "mu") label = FieldLabel::mu;
            else if (label_str == "tau+") label = FieldLabel::tau_plus;
            else if (label_str == "tau-") label = FieldLabel::tau_minus;
            else if (label_str == "tau1") label = FieldLabel::tau1;
            else if (label_str == "tau2") label = FieldLabel::tau2;
            else if (label_str == "omega") label = FieldLabel::omega;
            else { std::cerr << "unknown label " << label_str << "\n"; return 2; }
            FieldFlavor flavor = flavor_str == "homo"      ? FieldFlavor::homo
                                 : flavor_str == "nonhomo" ? FieldFlavor::nonhomo
                                                           : FieldFlavor::one_var;
            std::cout << field_to_json(build_field(label, flavor, field_window)).dump(2) << "\n";
            return 0;
        }
        if (dump_rep->parsed()) {
            RepFamily fam;
            if (family_str == "homo2") fam = RepFamily::homo2;
            else if (family_str == "nonhomo2") fam = RepFamily::nonhomo2;
            else if (family_str == "n1") fam = RepFamily::n1;
            else if (family_str == "n1_ds") fam = RepFamily::n1_ds;
            else if (family_str == "n2_one_var") fam = RepFamily::n2_one_var;
            else { std::cerr << "unknown family " << family_str << "\n"; return 2; }
            Kind kind;
            if (kind_str == "L") kind = Kind::L;
            else if (kind_str == "J") kind = Kind::J;
            else if (kind_str == "G+") kind = Kind::Gp;
            else if (kind_str == "G-") kind = Kind::Gm;
            else if (kind_str == "G1") kind = Kind::G1;
            else if (kind_str == "G2") kind = Kind::G2;
            else if (kind_str == "G") kind = Kind::Gn1;
            else { std::cerr << "unknown kind " << kind_str << "\n"; return 2; }
            GrassmannElement s = GrassmannElement::scalar(4, Scalar(3));
            auto ctx = make_rep_context(fam, 4, 12, s);
            SuperDerivation D = make_rep(ctx, kind, rep_index);
            Json j;
            j["family"] = family_str;
            j["element"] = basis_key_str(BasisKey{kind, rep_index});
            j["terms"] = Json::array();
            for (auto& [coeff, var] : D.parts)
                j["terms"].push_back({{"target", var}, {"coefficient", series_to_json(coeff)}});
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
