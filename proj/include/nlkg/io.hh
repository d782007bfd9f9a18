// Run configuration (strict JSON: unknown keys are errors), the field file
// container, CSV emission, and the run manifest. All outputs embed the config
// hash and the kappa in use; formatting is fixed so identical configs give
// byte-identical files.

#ifndef NLKG_IO_HH
#define NLKG_IO_HH

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlkg/final_data.hh"
#include "nlkg/grid.hh"
#include "nlkg/profile.hh"
#include "nlkg/residual.hh"
#include "nlkg/scattering.hh"

namespace nlkg {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalibrateOptions {
    std::vector<double> times{50, 71, 100, 141, 200};
    int grid_n = 1024;
    double box_L = 500;
};

struct RunConfig {
    uint64_t seed = 1;
    FinalState fs;
    std::optional<double> y_norm_target;
    ProfileParams pp;
    bool delta_cone_auto = true;
    LadderOptions ladder;
    PicardOptions picard;
    EvolveOptions evolve;
    int scatter_grid_n = 1024;
    double scatter_box_L = 1000;
    CalibrateOptions calibrate;
    std::string output_dir = "out";
    std::string experiment; // optional default subcommand

    std::string canonical; // sorted-key JSON dump used for hashing
    uint64_t hash() const; // FNV-1a over canonical

    // applies y_norm_target and auto delta_cone; call once before use
    void finalize();
};

RunConfig load_config(const std::string& path);
RunConfig config_from_json_text(const std::string& text);

// field file: text header (magic, name, n, L, t) + row-major little-endian f64
void write_field(const std::string& path, const RealField& f, double t,
                 const std::string& name);
RealField read_field(const std::string& path, double* t_out = nullptr,
                     std::string* name_out = nullptr);

// CSV with "# key=value" preamble; cells formatted with %.17g
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header,
              const std::vector<std::pair<std::string, std::string>>& preamble);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    ~CsvWriter();

  private:
    void* f_ = nullptr;
};

std::string format_g17(double x);

} // namespace nlkg

#endif
