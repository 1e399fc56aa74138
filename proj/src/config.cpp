#include "qmsn/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qmsn {
namespace {

const std::set<std::string> kKnownKeys = {
    "service", "mu", "n_pulses", "message_bits", "message", "n_bobs",
    "bob_secrets", "dishonest_bob", "channel.length_km",
    "channel.attenuation_db_per_km", "det.efficiency", "det.dark_count_prob",
    "attack.kind", "attack.p_swap", "attack.reflectance",
    "attack.injected_mean", "monitor.z_threshold", "monitor.min_gates",
    "monitor.watch_ports", "max_rounds", "trials", "seed", "output",
};

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line,
                       const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

double parse_double(const std::string& origin, std::size_t line,
                    const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    fail(origin, line, "key '" + key + "': not a number: '" + value + "'");
  }
  if (used != value.size())
    fail(origin, line, "key '" + key + "': trailing junk in '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& origin, std::size_t line,
                        const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    fail(origin, line,
         "key '" + key + "': not a nonnegative integer: '" + value + "'");
  }
  if (used != value.size() || value.find('-') != std::string::npos)
    fail(origin, line,
         "key '" + key + "': not a nonnegative integer: '" + value + "'");
  return v;
}

bool parse_bool(const std::string& origin, std::size_t line,
                const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(origin, line, "key '" + key + "': expected true/false: '" + value + "'");
}

struct RawScenario {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::size_t> entry_lines;
};

ScenarioSpec build_spec(const std::string& origin, const RawScenario& raw) {
  ScenarioSpec spec;
  spec.name = raw.name;

  bool is_figure2 = false;
  std::string attack_kind = "none";
  bool have_reflectance = false;
  double p_swap = 0.0;
  double reflectance = 0.0;
  double injected_mean = 0.0;
  DetectorParams det;  // shared by all three detectors

  for (std::size_t i = 0; i < raw.entries.size(); ++i) {
    const auto& [key, value] = raw.entries[i];
    const std::size_t line = raw.entry_lines[i];
    if (!kKnownKeys.count(key)) fail(origin, line, "unknown key '" + key + "'");

    if (key == "service") {
      if (value == "qkd")
        spec.base.service = Service::qkd;
      else if (value == "qsdc")
        spec.base.service = Service::qsdc;
      else if (value == "qss")
        spec.base.service = Service::qss;
      else if (value == "figure2")
        is_figure2 = true;
      else
        fail(origin, line,
             "key 'service': expected qkd|qsdc|qss|figure2, got '" + value +
                 "'");
    } else if (key == "mu") {
      spec.base.mu = parse_double(origin, line, key, value);
      if (!(spec.base.mu >= 0.0)) fail(origin, line, "mu must be >= 0");
    } else if (key == "n_pulses") {
      spec.base.n_pulses = parse_u64(origin, line, key, value);
    } else if (key == "message_bits") {
      spec.base.message_bits = parse_u64(origin, line, key, value);
    } else if (key == "message") {
      spec.qsdc_message = value;
    } else if (key == "n_bobs") {
      spec.base.n_bobs =
          static_cast<std::uint32_t>(parse_u64(origin, line, key, value));
    } else if (key == "bob_secrets") {
      spec.bob_secrets.clear();
      std::string token;
      std::istringstream is(value);
      while (std::getline(is, token, ','))
        spec.bob_secrets.push_back(trim(token));
    } else if (key == "dishonest_bob") {
      spec.base.dishonest_bob =
          static_cast<int>(parse_double(origin, line, key, value));
    } else if (key == "channel.length_km") {
      spec.base.channel.length_km = parse_double(origin, line, key, value);
    } else if (key == "channel.attenuation_db_per_km") {
      spec.base.channel.attenuation_db_per_km =
          parse_double(origin, line, key, value);
    } else if (key == "det.efficiency") {
      det.efficiency = parse_double(origin, line, key, value);
    } else if (key == "det.dark_count_prob") {
      det.dark_count_prob = parse_double(origin, line, key, value);
    } else if (key == "attack.kind") {
      attack_kind = value;
    } else if (key == "attack.p_swap") {
      p_swap = parse_double(origin, line, key, value);
    } else if (key == "attack.reflectance") {
      reflectance = parse_double(origin, line, key, value);
      have_reflectance = true;
    } else if (key == "attack.injected_mean") {
      injected_mean = parse_double(origin, line, key, value);
    } else if (key == "monitor.z_threshold") {
      spec.base.monitor.z_threshold = parse_double(origin, line, key, value);
    } else if (key == "monitor.min_gates") {
      spec.base.monitor.min_gates = parse_u64(origin, line, key, value);
    } else if (key == "monitor.watch_ports") {
      spec.base.monitor.watch_ports = parse_bool(origin, line, key, value);
    } else if (key == "max_rounds") {
      spec.base.max_rounds = parse_u64(origin, line, key, value);
    } else if (key == "trials") {
      spec.trials = parse_u64(origin, line, key, value);
    } else if (key == "seed") {
      spec.seed = parse_u64(origin, line, key, value);
    } else if (key == "output") {
      spec.output_path = value;
    }
  }

  spec.kind = is_figure2 ? ScenarioKind::figure2 : ScenarioKind::protocol;
  spec.base.detectors = DetectorSet(det);

  try {
    if (attack_kind == "none")
      spec.base.attack = AttackKind::none();
    else if (attack_kind == "intercept_resend")
      spec.base.attack = AttackKind::intercept_resend(p_swap);
    else if (attack_kind == "pns")
      spec.base.attack = AttackKind::pns();
    else if (attack_kind == "beam_splitter") {
      if (!have_reflectance) {
        // default: loss-matched tap, reflectance = 1 - T^2
        const double t = spec.base.channel.transmittance();
        reflectance = 1.0 - t * t;
      }
      spec.base.attack = AttackKind::beam_splitter(reflectance);
    } else if (attack_kind == "blinding")
      spec.base.attack = AttackKind::blinding(injected_mean);
    else
      fail(origin, raw.line,
           "key 'attack.kind': expected "
           "none|intercept_resend|pns|beam_splitter|blinding, got '" +
               attack_kind + "'");

    spec.base.detectors.validate();
    spec.base.channel.validate();
    spec.base.monitor.validate();
    if (spec.kind == ScenarioKind::protocol) spec.base.validate();
  } catch (const std::invalid_argument& e) {
    fail(origin, raw.line, std::string("scenario '") + spec.name + "': " +
                               e.what());
  }

  if (spec.trials == 0)
    fail(origin, raw.line, "trials must be >= 1");
  if (spec.kind == ScenarioKind::figure2 &&
      spec.base.n_pulses < spec.base.monitor.min_gates)
    fail(origin, raw.line,
         "figure2 scenarios need n_pulses >= monitor.min_gates");

  if (spec.base.service == Service::qsdc && !spec.qsdc_message.empty()) {
    for (char c : spec.qsdc_message)
      if (c != '0' && c != '1')
        fail(origin, raw.line, "key 'message': must contain only '0'/'1'");
  }
  if (spec.base.service == Service::qss && !spec.bob_secrets.empty()) {
    if (spec.bob_secrets.size() != spec.base.n_bobs)
      fail(origin, raw.line,
           "key 'bob_secrets': need exactly n_bobs comma-separated strings");
    for (const auto& s : spec.bob_secrets) {
      if (s.size() != spec.bob_secrets.front().size())
        fail(origin, raw.line,
             "key 'bob_secrets': secrets must have equal length");
      for (char c : s)
        if (c != '0' && c != '1')
          fail(origin, raw.line,
               "key 'bob_secrets': must contain only '0'/'1'");
    }
  }

  if (spec.output_path.empty()) spec.output_path = spec.name + ".csv";
  return spec;
}

}  // namespace

std::vector<ScenarioSpec> parse_config(const std::string& text,
                                       const std::string& origin) {
  std::vector<RawScenario> raws;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(is, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;

    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        fail(origin, lineno, "malformed section header: " + stripped);
      const std::string name = trim(stripped.substr(1, stripped.size() - 2));
      if (name.empty()) fail(origin, lineno, "empty scenario name");
      raws.push_back({name, lineno, {}, {}});
      continue;
    }

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(origin, lineno, "expected 'key = value': " + stripped);
    if (raws.empty())
      fail(origin, lineno, "key/value outside of a [scenario] section");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    raws.back().entries.emplace_back(key, value);
    raws.back().entry_lines.push_back(lineno);
  }

  if (raws.empty())
    throw std::runtime_error(origin + ": no scenarios defined");

  std::set<std::string> names;
  std::vector<ScenarioSpec> specs;
  specs.reserve(raws.size());
  for (const auto& raw : raws) {
    if (!names.insert(raw.name).second)
      fail(origin, raw.line, "duplicate scenario name '" + raw.name + "'");
    specs.push_back(build_spec(origin, raw));
  }
  return specs;
}

std::vector<ScenarioSpec> load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace qmsn
