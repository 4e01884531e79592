#pragma once
// Binary state snapshots with bit-exact round trip.
//
// Layout:
//   line 1   magic + format version        "alphamhd-checkpoint 1\n"
//   line 2   one-line JSON header          model, grid, parameters, t, dt
//   payload  raw little-endian IEEE-754 (re, im) pairs in storage order,
//            u components first, then b components
//
// t and dt are stored as the decimal fields "t"/"dt" for readability plus
// the bit patterns "t_bits"/"dt_bits" that are authoritative on load, so a
// resumed run continues on the exact floating-point step sequence. The
// payload precision matches the run precision and is recorded in the header.

#include <bit>
#include <fstream>

#include <json.hpp>

#include "alphamhd/models.hpp"

namespace alphamhd {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little endian");

inline constexpr const char* kCheckpointMagic = "alphamhd-checkpoint 1";

struct CheckpointInfo {
  ModelSpec spec;
  std::vector<int> n;
  std::vector<double> length;
  std::string precision;  // "f64" or "f32"
  std::string scheme;
  double t = 0.0;
  double dt = 0.0;
  std::uint64_t t_bits = 0;
  std::uint64_t dt_bits = 0;
};

namespace ckpt_detail {

inline CheckpointInfo parse_header(std::istream& in, const std::string& path) {
  std::string magic, header;
  if (!std::getline(in, magic) || magic != kCheckpointMagic)
    throw IoError("'" + path + "' is not a checkpoint file");
  if (!std::getline(in, header))
    throw IoError("'" + path + "': missing checkpoint header");
  nlohmann::json j = nlohmann::json::parse(header, nullptr, false);
  if (j.is_discarded())
    throw IoError("'" + path + "': malformed checkpoint header");
  CheckpointInfo info;
  try {
    info.spec.model = model_from_name(j.at("model").get<std::string>());
    info.spec.alpha = j.at("alpha").get<double>();
    info.spec.alpha_m = j.at("alpha_m").get<double>();
    info.spec.nu = j.at("nu").get<double>();
    info.spec.eta = j.at("eta").get<double>();
    info.n = j.at("n").get<std::vector<int>>();
    info.length = j.at("length").get<std::vector<double>>();
    info.precision = j.at("precision").get<std::string>();
    info.scheme = j.value("scheme", std::string("if_rk4"));
    info.t_bits = j.at("t_bits").get<std::uint64_t>();
    info.dt_bits = j.at("dt_bits").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "': bad checkpoint header: " + e.what());
  }
  info.t = bits_double(info.t_bits);
  info.dt = bits_double(info.dt_bits);
  return info;
}

template <class Real>
inline constexpr const char* precision_tag() {
  return std::is_same_v<Real, double> ? "f64" : "f32";
}

}  // namespace ckpt_detail

template <class Real>
inline void write_checkpoint(const std::string& path, const ModelSpec& spec,
                             const SolverState<Real>& state, double dt,
                             const std::string& scheme = "if_rk4") {
  const PeriodicGrid& g = *state.u.grid;
  nlohmann::json j;
  j["version"] = kCodeVersion;
  j["scheme"] = scheme;
  j["convention"] = "fwd=sum,inv=1/N";
  j["model"] = model_name(spec.model);
  j["alpha"] = spec.alpha;
  j["alpha_m"] = spec.alpha_m;
  j["nu"] = spec.nu;
  j["eta"] = spec.eta;
  std::vector<int> n(static_cast<std::size_t>(g.dim()));
  std::vector<double> length(n.size());
  for (int a = 0; a < g.dim(); ++a) {
    n[static_cast<std::size_t>(a)] = g.size(a);
    length[static_cast<std::size_t>(a)] = g.length(a);
  }
  j["n"] = n;
  j["length"] = length;
  j["precision"] = ckpt_detail::precision_tag<Real>();
  j["t"] = state.t;
  j["dt"] = dt;
  j["t_bits"] = double_bits(state.t);
  j["dt_bits"] = double_bits(dt);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kCheckpointMagic << '\n' << j.dump() << '\n';
  for (const SpectralField<Real>* f : {&state.u, &state.b})
    out.write(reinterpret_cast<const char*>(f->data.data()),
              static_cast<std::streamsize>(f->data.size() *
                                           sizeof(std::complex<Real>)));
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline CheckpointInfo peek_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ckpt_detail::parse_header(in, path);
}

// Loads the state; info output receives the header. The stored precision
// must match Real.
template <class Real>
inline SolverState<Real> read_checkpoint(const std::string& path,
                                         CheckpointInfo& info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  info = ckpt_detail::parse_header(in, path);
  if (info.precision != ckpt_detail::precision_tag<Real>())
    throw IoError("'" + path + "': stored precision " + info.precision +
                  " does not match the requested run precision");
  GridPtr grid = make_grid(info.n, info.length);
  SolverState<Real> state(grid);
  state.t = info.t;
  for (SpectralField<Real>* f : {&state.u, &state.b}) {
    in.read(reinterpret_cast<char*>(f->data.data()),
            static_cast<std::streamsize>(f->data.size() *
                                         sizeof(std::complex<Real>)));
    if (in.gcount() != static_cast<std::streamsize>(
                           f->data.size() * sizeof(std::complex<Real>)))
      throw IoError("'" + path + "': truncated checkpoint payload");
  }
  return state;
}

}  // namespace alphamhd
