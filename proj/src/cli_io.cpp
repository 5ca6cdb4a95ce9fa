#include "cfmimo/cli_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace cfmimo {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

struct Field {
  std::string name;
  std::function<bool(SystemConfig&, std::string_view)> parse;
  std::function<std::string(const SystemConfig&)> format;
};

template <class T>
Field scalar(std::string name, T SystemConfig::*member) {
  return {std::move(name),
          [member](SystemConfig& c, std::string_view v) {
            auto x = parse_number<T>(v);
            if (!x) return false;
            c.*member = *x;
            return true;
          },
          [member](const SystemConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <class T>
Field solver_field(std::string name, T SolverSettings::*member) {
  return {std::move(name),
          [member](SystemConfig& c, std::string_view v) {
            auto x = parse_number<T>(v);
            if (!x) return false;
            c.solver.*member = *x;
            return true;
          },
          [member](const SystemConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.solver.*member);
            else return std::to_string(c.solver.*member);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(scalar("num_aps", &SystemConfig::num_aps));
    f.push_back(scalar("antennas_per_ap", &SystemConfig::antennas_per_ap));
    f.push_back(scalar("num_users", &SystemConfig::num_users));
    f.push_back(scalar("selected_aps", &SystemConfig::selected_aps));
    f.push_back(scalar("area_side", &SystemConfig::area_side));
    f.push_back(scalar("carrier_freq_mhz", &SystemConfig::carrier_freq_mhz));
    f.push_back(scalar("ap_height", &SystemConfig::ap_height));
    f.push_back(scalar("user_height", &SystemConfig::user_height));
    f.push_back(scalar("shadow_sigma_db", &SystemConfig::shadow_sigma_db));
    f.push_back(scalar("d0", &SystemConfig::d0));
    f.push_back(scalar("d1", &SystemConfig::d1));
    f.push_back(scalar("noise_temp", &SystemConfig::noise_temp));
    f.push_back(scalar("bandwidth", &SystemConfig::bandwidth));
    f.push_back(scalar("noise_figure_db", &SystemConfig::noise_figure_db));
    f.push_back(scalar("symbol_power", &SystemConfig::symbol_power));
    f.push_back(scalar("csi_quality", &SystemConfig::csi_quality));
    f.push_back({"snr_grid_db",
                 [](SystemConfig& c, std::string_view v) {
                   std::vector<double> grid;
                   while (true) {
                     const auto comma = v.find(',');
                     auto x = parse_number<double>(v.substr(0, comma));
                     if (!x) return false;
                     grid.push_back(*x);
                     if (comma == std::string_view::npos) break;
                     v.remove_prefix(comma + 1);
                   }
                   c.snr_grid_db = std::move(grid);
                   return true;
                 },
                 [](const SystemConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i) {
                     if (i) out += ", ";
                     out += format_double(c.snr_grid_db[i]);
                   }
                   return out;
                 }});
    f.push_back(scalar("total_power_factor", &SystemConfig::total_power_factor));
    f.push_back(scalar("rng_seed", &SystemConfig::rng_seed));
    f.push_back(solver_field("opa_iterations", &SolverSettings::opa_iterations));
    f.push_back(solver_field("opa_tol", &SolverSettings::opa_tol));
    f.push_back(solver_field("apa_step", &SolverSettings::apa_step));
    f.push_back(solver_field("apa_iterations", &SolverSettings::apa_iterations));
    f.push_back(solver_field("symbols_per_packet", &SolverSettings::symbols_per_packet));
    f.push_back(solver_field("packets", &SolverSettings::packets));
    f.push_back(solver_field("es_budget", &SolverSettings::es_budget));
    f.push_back(solver_field("trials", &SolverSettings::trials));
    f.push_back(solver_field("threads", &SolverSettings::threads));
    return f;
  }();
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.name);
  return keys;
}

SystemConfig parse_config(std::string_view text, const SystemConfig& base) {
  SystemConfig cfg = base;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "missing key");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");

    const Field* field = nullptr;
    for (const auto& f : fields())
      if (f.name == key) field = &f;
    if (!field) throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    if (!field->parse(cfg, value))
      throw ParseError(line_no, "cannot parse value '" + std::string(value) + "' for '" +
                                    std::string(key) + "'");
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path, const SystemConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string serialize_config(const SystemConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += f.name + " = " + f.format(cfg) + "\n";
  return out;
}

namespace {

std::vector<Scheme> parse_schemes(const std::vector<std::string_view>& names) {
  std::vector<Scheme> out;
  for (auto n : names) out.push_back(Scheme::parse(n));
  return out;
}

std::vector<ExperimentPreset> build_presets() {
  std::vector<ExperimentPreset> list;

  {
    ExperimentPreset p;
    p.name = "fig-learning";
    p.description = "APA cost per iteration, L=24 N=4 S=12 K=8 n=1, SNR 25 dB, step 0.25";
    p.config.num_aps = 24;
    p.config.antennas_per_ap = 4;
    p.config.selected_aps = 12;
    p.config.num_users = 8;
    p.config.csi_quality = 1.0;
    p.config.snr_grid_db = {25.0};
    p.kind = PresetKind::LearningCurve;
    p.scheme = Scheme::parse("MMSE+APA+LS");
    p.snr_db = 25.0;
    list.push_back(p);
  }
  auto tiny = [] {
    SystemConfig c;
    c.num_aps = 5;
    c.antennas_per_ap = 1;
    c.selected_aps = 3;
    c.num_users = 2;
    c.csi_quality = 0.99;
    return c;
  };
  {
    ExperimentPreset p;
    p.name = "fig-tiny-opa";
    p.description = "sum rate vs SNR with OPA, ES against LS selection, L=5 N=1 S=3 K=2 n=0.99";
    p.config = tiny();
    p.sweep.schemes = parse_schemes({"MMSE+OPA+ES", "MMSE+OPA+LS", "ZF+OPA+ES", "ZF+OPA+LS",
                                     "CB+OPA+ES", "CB+OPA+LS"});
    list.push_back(p);
  }
  {
    ExperimentPreset p;
    p.name = "fig-tiny-apa";
    p.description = "sum rate vs SNR with APA, ES against LS selection, L=5 N=1 S=3 K=2 n=0.99";
    p.config = tiny();
    p.sweep.schemes = parse_schemes({"MMSE+APA+ES", "MMSE+APA+LS", "MMSE-CONV+APA+ES", "MMSE-CONV+APA+LS"});
    list.push_back(p);
  }
  auto large = [] {
    SystemConfig c;
    c.num_aps = 128;
    c.antennas_per_ap = 1;
    c.selected_aps = 64;
    c.num_users = 16;
    c.csi_quality = 0.99;
    return c;
  };
  const std::vector<std::string_view> large_schemes = {"MMSE+OPA+LS", "ZF+OPA+LS", "CB+OPA+LS", "MMSE+APA+LS",
                              "MMSE-CONV+APA+LS", "MMSE+UPA+LS", "ZF+UPA+LS", "CB+UPA+LS"};
  {
    ExperimentPreset p;
    p.name = "fig-large-minsinr";
    p.description = "minimum SINR vs SNR, L=128 N=1 S=64 K=16 n=0.99";
    p.config = large();
    p.sweep.schemes = parse_schemes(large_schemes);
    list.push_back(p);
  }
  {
    ExperimentPreset p;
    p.name = "fig-large-sumrate";
    p.description = "sum rate vs SNR, L=128 N=1 S=64 K=16 n=0.99";
    p.config = large();
    p.sweep.schemes = parse_schemes(large_schemes);
    list.push_back(p);
  }
  {
    ExperimentPreset p;
    p.name = "fig-selection-fraction";
    p.description = "sum rate vs fraction of selected APs, L=128 N=1 K=16 n=1, SNR 10 dB";
    p.config = large();
    p.config.csi_quality = 1.0;
    p.config.snr_grid_db = {10.0};
    p.sweep.axis = SweepAxis::SelectionFraction;
    p.sweep.values = {0.125, 0.25, 0.5, 0.75, 1.0};
    p.sweep.schemes = parse_schemes({"MMSE+OPA+LS", "MMSE+UPA+LS", "ZF+OPA+LS", "CB+OPA+LS"});
    list.push_back(p);
  }
  {
    ExperimentPreset p;
    p.name = "fig-antenna-split";
    p.description = "sum rate vs SNR for M=256 split over N in {1,2,4,8} antennas per AP, S=L/2, K=16";
    p.config = large();
    p.config.num_aps = 256;
    p.config.selected_aps = 128;
    p.sweep.axis = SweepAxis::AntennasPerAp;
    p.sweep.values = {1.0, 2.0, 4.0, 8.0};
    p.sweep.schemes = parse_schemes({"MMSE+UPA+LS"});
    list.push_back(p);
  }
  {
    ExperimentPreset p;
    p.name = "fig-ber";
    p.description = "QPSK BER vs SNR, L=24 N=4 S=12 K=8 n=1, 100 symbols per packet";
    p.config.num_aps = 24;
    p.config.antennas_per_ap = 4;
    p.config.selected_aps = 12;
    p.config.num_users = 8;
    p.config.csi_quality = 1.0;
    p.config.solver.symbols_per_packet = 100;
    p.sweep.measure_ber = true;
    p.sweep.schemes = parse_schemes({"MMSE+OPA+LS", "ZF+OPA+LS", "CB+OPA+LS", "MMSE+APA+LS",
                                     "MMSE+UPA+LS"});
    list.push_back(p);
  }
  for (auto& p : list) p.config.validate();
  return list;
}

}  // namespace

const std::vector<ExperimentPreset>& presets() {
  static const std::vector<ExperimentPreset> list = build_presets();
  return list;
}

std::string preset_names() {
  std::string out;
  for (const auto& p : presets()) {
    if (!out.empty()) out += ", ";
    out += p.name;
  }
  return out;
}

const ExperimentPreset& find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'; valid: " + preset_names());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    if (r.scheme.find(',') != std::string::npos || r.axis_name.find(',') != std::string::npos)
      throw IoError("write_results_csv: commas are not allowed in scheme or axis names");
    os << r.scheme << ',' << r.axis_name << ',' << format_double(r.axis_value) << ','
       << format_double(r.sum_rate_mean) << ',' << format_double(r.sum_rate_se) << ','
       << format_double(r.min_sinr_db_mean) << ',' << format_double(r.min_sinr_db_se) << ','
       << opt(r.ber_mean) << ',' << opt(r.ber_se) << ',' << r.trials << ',' << r.seed << '\n';
  }
}

std::vector<SweepRow> read_results_csv(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw ParseError(1, "unexpected header");

  auto number = [&](const std::string& s) {
    auto x = parse_number<double>(s);
    if (!x) throw ParseError(line_no, "bad number '" + s + "'");
    return *x;
  };
  auto maybe = [&](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return number(s);
  };

  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 11) throw ParseError(line_no, "expected 11 fields");
    SweepRow r;
    r.scheme = c[0];
    r.axis_name = c[1];
    r.axis_value = number(c[2]);
    r.sum_rate_mean = number(c[3]);
    r.sum_rate_se = number(c[4]);
    r.min_sinr_db_mean = number(c[5]);
    r.min_sinr_db_se = number(c[6]);
    r.ber_mean = maybe(c[7]);
    r.ber_se = maybe(c[8]);
    auto trials = parse_number<int>(c[9]);
    auto seed = parse_number<std::uint64_t>(c[10]);
    if (!trials || !seed) throw ParseError(line_no, "bad trials or seed");
    r.trials = *trials;
    r.seed = *seed;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_learning_csv(std::ostream& os, const LearningCurve& curve, int trials, std::uint64_t seed) {
  os << kLearningHeader << '\n';
  for (std::size_t i = 0; i < curve.cost_mean.size(); ++i)
    os << i << ',' << format_double(curve.cost_mean[i]) << ',' << format_double(curve.cost_se[i]) << ','
       << trials << ',' << seed << '\n';
}

std::filesystem::path sidecar_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p.replace_extension(".config.json");
  return p;
}

std::string config_json(const SystemConfig& cfg, const ExperimentPreset* preset) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json c;
  for (const auto& f : fields()) {
    if (f.name == "snr_grid_db") c[f.name] = cfg.snr_grid_db;
    else c[f.name] = nlohmann::ordered_json::parse(f.format(cfg));
  }
  j["config"] = c;
  j["noise_variance"] = cfg.noise_variance();
  if (preset) {
    j["preset"] = preset->name;
    j["description"] = preset->description;
    if (preset->kind == PresetKind::LearningCurve) {
      j["scheme"] = preset->scheme.name();
      j["snr_db"] = preset->snr_db;
    } else {
      std::vector<std::string> schemes;
      for (const auto& s : preset->sweep.schemes) schemes.push_back(s.name());
      j["schemes"] = schemes;
      j["axis"] = std::string(to_string(preset->sweep.axis));
      j["axis_values"] = preset->sweep.values;
      j["measure_ber"] = preset->sweep.measure_ber;
    }
  }
  return j.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void emit_results(const std::vector<SweepRow>& rows, const std::filesystem::path& out,
                  const SystemConfig& cfg, const ExperimentPreset* preset) {
  std::ostringstream csv;
  write_results_csv(csv, rows);
  write_file(out, csv.str());
  write_file(sidecar_path(out), config_json(cfg, preset));
}

void emit_learning_curve(const LearningCurve& curve, const std::filesystem::path& out,
                         const SystemConfig& cfg, const ExperimentPreset* preset) {
  std::ostringstream csv;
  write_learning_csv(csv, curve, cfg.solver.trials, cfg.rng_seed);
  write_file(out, csv.str());
  write_file(sidecar_path(out), config_json(cfg, preset));
}

}  // namespace cfmimo
