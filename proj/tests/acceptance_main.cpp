// Prints one PASS/FAIL line per acceptance criterion. Criteria listed with
// --expect-fail are still run and printed; they only stop counting toward
// the exit status.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "krorder/acceptance.hpp"

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

// stdout of a shell command, or nullopt when it cannot run or exits nonzero.
std::optional<std::string> capture(const std::string& cmd) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return std::nullopt;
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  if (pclose(pipe) != 0) return std::nullopt;
  return out;
}

std::string format_metrics(const krorder::acceptance::CriterionResult& r) {
  std::string s;
  char buf[64];
  for (const auto& m : r.metrics) {
    std::snprintf(buf, sizeof buf, "%.6g", m.value);
    s += (s.empty() ? "" : ", ") + m.name + "=" + buf;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::uint64_t seed = 0;
  std::string cli;
  std::vector<int> expect_fail;
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--cli", cli, "path to the krorder executable")->required();
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> known(expect_fail.begin(), expect_fail.end());

  int unexpected = 0, passed = 0;
  auto report = [&](int id, bool pass, const std::string& name, const std::string& detail, double seconds) {
    std::printf("[%s] %2d %s (%s; %.2fs)%s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds,
                !pass && known.count(id) ? " [known failure]" : "");
    std::fflush(stdout);
    passed += pass;
    if (!pass && !known.count(id)) ++unexpected;
  };

  for (const auto& r : krorder::acceptance::run_all(seed)) report(r.id, r.pass, r.name, format_metrics(r), r.seconds);

  const std::string cmd = "'" + cli + "' selftest --seed 0";
  const auto t0 = std::chrono::steady_clock::now();
  const auto first = capture(cmd), second = capture(cmd);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (first && second) {
    const auto h1 = sha256_hex(*first), h2 = sha256_hex(*second);
    report(11, h1 == h2, "Determinism: selftest --seed 0 twice", "sha256 " + h1.substr(0, 16) + " vs " + h2.substr(0, 16),
           secs);
  } else {
    report(11, false, "Determinism: selftest --seed 0 twice", "selftest did not run", secs);
  }
  std::printf("%d/11 criteria passed\n", passed);
  return unexpected == 0 ? 0 : 1;
}
