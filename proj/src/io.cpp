#include "fedce/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fedce {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

constexpr char kMagic[4] = {'F', 'C', 'P', 'V'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ofstream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_param_vector(const std::string& path, const ParamVector& w) {
  auto out = open_out(path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, w.size());
  for (double v : w) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParamVector read_param_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a parameter checkpoint: " + path);
  if (get_u32(in) != kVersion) throw std::runtime_error("unsupported checkpoint version");
  const uint64_t d = get_u64(in);
  ParamVector w(d);
  for (uint64_t i = 0; i < d; ++i) {
    const uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    w[i] = v;
  }
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  return w;
}

void write_rounds_csv(const std::string& path, const std::vector<RoundClientLog>& logs) {
  auto out = open_out(path);
  out << "round,client_id,gamma_cos,gamma_err,gamma_m,gamma_s,rho,"
         "local_val_error,global_val_error\n";
  for (const auto& log : logs) {
    out << log.round << ',' << log.client_id << ',' << format_number(log.gamma_cos) << ','
        << format_number(log.gamma_err) << ',' << format_number(log.gamma_m) << ','
        << format_number(log.gamma_s) << ',' << format_number(log.rho) << ','
        << format_number(log.local_val_error) << ',' << format_number(log.global_val_error)
        << '\n';
  }
}

void write_contributions_json(const std::string& path, const RunResult& result) {
  const int n = result.ledger.n_clients ? result.ledger.n_clients
                                        : static_cast<int>(result.final_rho.size());
  Vec cum_cos(n, 0.0), cum_err(n, 0.0);
  for (const auto& round : result.ledger.rounds) {
    for (int i = 0; i < n; ++i) {
      cum_cos[i] += round.gamma_cos[i];
      cum_err[i] += round.gamma_err[i];
    }
  }

  json clients = json::array();
  for (int i = 0; i < n; ++i) {
    json c;
    c["client_id"] = i;
    c["rho_final"] = result.final_rho[i];
    c["cumulative_gamma_cos"] = cum_cos[i];
    c["cumulative_gamma_err"] = cum_err[i];
    c["degenerate_round_count"] = result.ledger.degenerate_rounds;
    clients.push_back(c);
  }
  json root;
  root["clients"] = clients;
  auto out = open_out(path);
  out << root.dump(2) << '\n';
}

void write_freerider_csv(const std::string& path, const std::vector<RoundClientLog>& logs) {
  auto out = open_out(path);
  out << "round,client_id,score\n";
  for (const auto& log : logs)
    out << log.round << ',' << log.client_id << ',' << format_number(log.free_rider_score)
        << '\n';
}

void write_rho_trace_csv(const std::string& path, const std::vector<RhoTraceRow>& rows) {
  auto out = open_out(path);
  out << "round,client_id,rho,kappa,eta,a_proxy\n";
  for (const auto& r : rows)
    out << r.round << ',' << r.client_id << ',' << format_number(r.rho) << ',' << r.kappa << ','
        << format_number(r.eta) << ',' << format_number(r.a_proxy) << '\n';
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  auto out = open_out(path);
  out << "round,algorithm,seed,mean_val_score\n";
  for (const auto& r : rows)
    out << r.round << ',' << r.algorithm << ',' << r.seed << ','
        << format_number(r.mean_val_score) << '\n';
}

}  // namespace fedce
