#include "sid/generator.hpp"

#include <cmath>
#include <sstream>

#include "sid/error.hpp"

namespace sid {

namespace {

constexpr int kMaxAmplification = 6;
constexpr int kMaxAtoms = 256;

int parse_positive(const std::string& token, const std::string& pattern) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || v < 1)
    throw Error(ErrorKind::InvalidInput, "bad multiplicity pattern '" + pattern + "' at '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Complex point_value(int p) { return {0.7 * p, 0.3 * (p % 3)}; }

}  // namespace

std::vector<ClassPattern> parse_pattern(const std::string& pattern, int default_n) {
  std::vector<ClassPattern> out;
  for (const std::string& part : split(pattern, ';')) {
    ClassPattern cp;
    std::string body = part;
    const auto colon = part.find(':');
    if (colon != std::string::npos) {
      const std::string head = part.substr(0, colon);
      body = part.substr(colon + 1);
      if (head == "inf") {
        const int k = parse_positive(body, pattern);
        cp.points.assign(static_cast<std::size_t>(k), std::nullopt);
        out.push_back(std::move(cp));
        continue;
      }
      cp.dim = parse_positive(head, pattern);
    } else {
      cp.dim = default_n;
    }
    for (const std::string& tok : split(body, ',')) {
      if (tok == "inf") cp.points.push_back(std::nullopt);
      else cp.points.push_back(parse_positive(tok, pattern));
    }
    if (cp.points.empty()) throw Error(ErrorKind::InvalidInput, "empty class in pattern '" + pattern + "'");
    out.push_back(std::move(cp));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "empty multiplicity pattern");
  return out;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Complex uniform_complex(Rng& rng) { return {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}; }

Matrix random_unitary(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, n);
}

Matrix random_si_block(Rng& rng, int n, Complex phi) {
  Matrix b = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    b(r, r) = phi;
    for (int c = r + 1; c < n; ++c) {
      if (c == r + 1) b(r, c) = std::polar(uniform(rng, 0.1, 1.0), uniform(rng, 0.0, 2.0 * M_PI));
      else b(r, c) = uniform_complex(rng);
    }
  }
  return b;
}

Series random_invertible_series(Rng& rng, const CommutantAlgebra& algebra, int m, double kappa_cap) {
  double scale = 0.3;
  for (int attempt = 0;; ++attempt) {
    Series s(algebra.n(), Matrix::Zero(m, m));
    Eigen::VectorXcd sv(m);
    for (int a = 0; a < m; ++a) sv(a) = uniform(rng, 1.0, 4.0);
    s[0] = random_unitary(rng, m) * sv.asDiagonal() * random_unitary(rng, m);
    for (int k = 1; k < algebra.n(); ++k)
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) s[k](r, c) = scale * uniform_complex(rng);
    if (linalg::condition_number(algebra.expand(s)) <= kappa_cap) return s;
    if (attempt % 10 == 9) scale *= 0.5;
  }
}

Json generate_instance(const GeneratorConfig& config, const Tolerances& tol) {
  if (config.n < 1 || config.n > tol.max_dim)
    throw Error(ErrorKind::SizeLimit, "fiber dimension outside [1, " + std::to_string(tol.max_dim) + "]");
  if (config.m < 1 || config.m > kMaxAmplification)
    throw Error(ErrorKind::SizeLimit, "amplification outside [1, " + std::to_string(kMaxAmplification) + "]");
  std::vector<ClassPattern> classes;
  if (config.pattern.empty()) {
    if (config.atoms < 1) throw Error(ErrorKind::SizeLimit, "need at least one atom");
    classes.push_back({config.n, std::vector<std::optional<int>>(config.atoms, 1)});
  } else {
    classes = parse_pattern(config.pattern, config.n);
  }
  int total = 0;
  for (const ClassPattern& cp : classes) {
    if (cp.dim && *cp.dim > tol.max_dim)
      throw Error(ErrorKind::SizeLimit, "class dimension above the configured maximum");
    for (const auto& p : cp.points) total += p.value_or(1);
  }
  if (total > kMaxAtoms) throw Error(ErrorKind::SizeLimit, "too many atoms");

  Rng rng(config.seed);
  const int m = config.m;
  Json atoms = Json::array();
  Json t_field = Json::object(), q_field = Json::object();
  std::vector<Json> f_fields(m, Json::object()), g_fields(m, Json::object());
  Json rank_profile = Json::object();
  Json multiplicities = Json::array();
  bool unique = true;
  int point = 0, label = 0, finite_points = 0;

  for (const ClassPattern& cp : classes) {
    Json cls = {{"dim", cp.dim ? Json(*cp.dim) : Json("inf")}, {"points", Json::array()}};
    for (const auto& mult : cp.points) {
      const Complex phi = point_value(point++);
      if (!cp.dim || !mult) {
        unique = false;
        Json a = {{"label", "a" + std::to_string(label++)},
                  {"weight", uniform(rng, 0.5, 2.0)},
                  {"fiber_dim", "inf"}};
        if (cp.dim) {
          a["class"] = *cp.dim;
          a["phi"] = complex_to_json(phi);
        }
        atoms.push_back(std::move(a));
        cls["points"].push_back("inf");
        continue;
      }
      ++finite_points;
      cls["points"].push_back(*mult);
      const int n = *cp.dim;
      const Matrix block = random_si_block(rng, n, phi);
      const CommutantAlgebra algebra(Matrix(block - phi * Matrix::Identity(n, n)));
      for (int copy = 0; copy < *mult; ++copy) {
        const std::string name = "a" + std::to_string(label++);
        atoms.push_back({{"label", name}, {"weight", uniform(rng, 0.5, 2.0)}, {"fiber_dim", n}});
        t_field[name] = matrix_to_json(block);

        const Series g = random_invertible_series(rng, algebra, m);
        Matrix p0 = Matrix::Zero(m, m);
        int rank = 0;
        for (int a = 0; a < m; ++a)
          if (uniform(rng, 0.0, 1.0) < 0.5) {
            p0(a, a) = 1.0;
            ++rank;
          }
        q_field[name] = matrix_to_json(
            algebra.expand(algebra.conjugate(g, algebra.constant(p0), algebra.inverse(g))));
        rank_profile[name] = rank;

        for (auto* family : {&f_fields, &g_fields}) {
          const Series h = random_invertible_series(rng, algebra, m);
          const Series h_inv = algebra.inverse(h);
          for (int a = 0; a < m; ++a) {
            Matrix e = Matrix::Zero(m, m);
            e(a, a) = 1.0;
            (*family)[a][name] = matrix_to_json(algebra.expand(algebra.conjugate(h, algebra.constant(e), h_inv)));
          }
        }
      }
    }
    multiplicities.push_back(std::move(cls));
  }

  Json fields = Json::object();
  fields["T"] = std::move(t_field);
  fields["Q"] = std::move(q_field);
  Json fam_f = Json::array(), fam_g = Json::array();
  for (int a = 0; a < m; ++a) {
    fields["F" + std::to_string(a + 1)] = std::move(f_fields[a]);
    fam_f.push_back("F" + std::to_string(a + 1));
  }
  for (int a = 0; a < m; ++a) {
    fields["G" + std::to_string(a + 1)] = std::move(g_fields[a]);
    fam_g.push_back("G" + std::to_string(a + 1));
  }

  Json doc;
  doc["space"] = {{"atoms", std::move(atoms)}};
  doc["fields"] = std::move(fields);
  doc["families"] = {{"F", std::move(fam_f)}, {"G", std::move(fam_g)}};
  doc["truth"] = {{"seed", config.seed},
                  {"n", config.n},
                  {"m", m},
                  {"pattern", config.pattern},
                  {"unique", unique},
                  {"mutually_singular", true},
                  {"k0_rank", finite_points},
                  {"multiplicities", std::move(multiplicities)},
                  {"rank_profile", std::move(rank_profile)}};
  return doc;
}

}  // namespace sid
