#include "nlkg/io.hh"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nlkg {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
}

std::vector<GaussianAtom> parse_atoms(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw std::invalid_argument("config: " + where + " must be an array");
    std::vector<GaussianAtom> out;
    for (const auto& a : arr) {
        require_keys(a, where + " atom", {"a", "x0", "sigma"});
        GaussianAtom at;
        at.a = a.at("a").get<double>();
        auto x0 = a.at("x0");
        if (!x0.is_array() || x0.size() != 2)
            throw std::invalid_argument("config: atom x0 must be [x, y]");
        at.x0 = {x0[0].get<double>(), x0[1].get<double>()};
        at.sigma = a.at("sigma").get<double>();
        if (!(at.sigma > 0)) throw std::invalid_argument("config: atom sigma must be > 0");
        out.push_back(at);
    }
    return out;
}

} // namespace

uint64_t RunConfig::hash() const {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void RunConfig::finalize() {
    if (y_norm_target) scale_to_y_norm(fs, *y_norm_target);
    pp.kappa = fs.kappa;
    if (delta_cone_auto) pp.delta_cone = pick_delta_cone(fs);
    pp.validate();
}

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse failure: ") + e.what());
    }
    require_keys(j, "top level",
                 {"seed", "final_state", "profile", "residuals", "solver", "calibrate",
                  "output_dir", "experiment"});
    RunConfig c;
    c.canonical = j.dump(); // nlohmann objects iterate sorted by key

    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();

    if (j.contains("final_state")) {
        const auto& f = j["final_state"];
        require_keys(f, "final_state", {"kappa", "phi0", "phi1", "y_norm_target"});
        if (f.contains("kappa")) c.fs.kappa = f["kappa"].get<double>();
        if (f.contains("phi0")) c.fs.atoms0 = parse_atoms(f["phi0"], "phi0");
        if (f.contains("phi1")) c.fs.atoms1 = parse_atoms(f["phi1"], "phi1");
        if (f.contains("y_norm_target")) c.y_norm_target = f["y_norm_target"].get<double>();
    }

    if (j.contains("profile")) {
        const auto& p = j["profile"];
        require_keys(p, "profile", {"lambda", "d", "n_max", "delta_cone"});
        if (p.contains("lambda")) c.pp.lambda = p["lambda"].get<double>();
        if (p.contains("d")) c.pp.d = p["d"].get<double>();
        if (p.contains("n_max")) c.pp.n_max = p["n_max"].get<int>();
        if (p.contains("delta_cone")) {
            if (p["delta_cone"].is_string()) {
                if (p["delta_cone"].get<std::string>() != "auto")
                    throw std::invalid_argument("config: delta_cone must be a number or \"auto\"");
            } else {
                c.pp.delta_cone = p["delta_cone"].get<double>();
                c.delta_cone_auto = false;
            }
        }
    }

    if (j.contains("residuals")) {
        const auto& r = j["residuals"];
        require_keys(r, "residuals",
                     {"times", "h_target", "box_factor", "n_cap", "ht_coeff", "with_no_psi"});
        if (r.contains("times")) c.ladder.times = r["times"].get<std::vector<double>>();
        if (r.contains("h_target")) c.ladder.h_target = r["h_target"].get<double>();
        if (r.contains("box_factor")) c.ladder.box_factor = r["box_factor"].get<double>();
        if (r.contains("n_cap")) c.ladder.n_cap = r["n_cap"].get<int>();
        if (r.contains("ht_coeff")) c.ladder.ht_coeff = r["ht_coeff"].get<double>();
        if (r.contains("with_no_psi")) c.ladder.with_no_psi = r["with_no_psi"].get<bool>();
    }

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        require_keys(s, "solver",
                     {"T", "T_end", "n_tau", "max_iter", "dt", "record_times", "grid_n", "box_L",
                      "ht_coeff"});
        if (s.contains("T")) {
            c.picard.T = s["T"].get<double>();
            c.evolve.T = c.picard.T;
        }
        if (s.contains("T_end")) {
            c.picard.T_end = s["T_end"].get<double>();
            c.evolve.T_end = c.picard.T_end;
        }
        if (s.contains("n_tau")) c.picard.n_tau = s["n_tau"].get<int>();
        if (s.contains("max_iter")) c.picard.max_iter = s["max_iter"].get<int>();
        if (s.contains("ht_coeff")) c.picard.ht_coeff = s["ht_coeff"].get<double>();
        if (s.contains("dt")) c.evolve.dt = s["dt"].get<double>();
        if (s.contains("record_times"))
            c.evolve.record_times = s["record_times"].get<std::vector<double>>();
        if (s.contains("grid_n")) c.scatter_grid_n = s["grid_n"].get<int>();
        if (s.contains("box_L")) c.scatter_box_L = s["box_L"].get<double>();
    }

    if (j.contains("calibrate")) {
        const auto& k = j["calibrate"];
        require_keys(k, "calibrate", {"times", "grid_n", "box_L"});
        if (k.contains("times")) c.calibrate.times = k["times"].get<std::vector<double>>();
        if (k.contains("grid_n")) c.calibrate.grid_n = k["grid_n"].get<int>();
        if (k.contains("box_L")) c.calibrate.box_L = k["box_L"].get<double>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

void write_field(const std::string& path, const RealField& f, double t,
                 const std::string& name) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "KGFIELD 1\n"
        << "name " << name << "\n"
        << "n " << f.grid.n << "\n"
        << "L " << format_g17(f.grid.length) << "\n"
        << "t " << format_g17(t) << "\n"
        << "data float64 row_major\n";
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!out) throw IoError("write failure: " + path);
}

RealField read_field(const std::string& path, double* t_out, std::string* name_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open field file: " + path);
    std::string magic, ver;
    in >> magic >> ver;
    if (magic != "KGFIELD" || ver != "1") throw IoError("bad field file magic: " + path);
    std::string key, name, dtype, order;
    int n = 0;
    double L = 0, t = 0;
    in >> key >> name;
    in >> key >> n;
    in >> key >> L;
    in >> key >> t;
    in >> key >> dtype >> order;
    in.get(); // newline before payload
    if (dtype != "float64") throw IoError("unsupported field dtype: " + dtype);
    RealField f(Grid2D::make(n, L));
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!in) throw IoError("truncated field file: " + path);
    if (t_out) *t_out = t;
    if (name_out) *name_out = name;
    return f;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::pair<std::string, std::string>>& preamble) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for writing: " + path);
    f_ = f;
    for (const auto& [k, v] : preamble) std::fprintf(f, "# %s=%s\n", k.c_str(), v.c_str());
    for (size_t i = 0; i < header.size(); ++i)
        std::fprintf(f, "%s%s", header[i].c_str(), i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    FILE* f = static_cast<FILE*>(f_);
    for (size_t i = 0; i < values.size(); ++i)
        std::fprintf(f, "%.17g%s", values[i], i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    FILE* f = static_cast<FILE*>(f_);
    for (size_t i = 0; i < cells.size(); ++i)
        std::fprintf(f, "%s%s", cells[i].c_str(), i + 1 < cells.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(static_cast<FILE*>(f_));
}

} // namespace nlkg
