#include "dvs/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dvs/rng.hpp"

namespace fs = std::filesystem;

namespace dvs {

namespace {

std::vector<double> parse_csv_line(const std::string& line, const std::string& path,
                                   long lineno) {
  std::vector<double> out;
  const char* s = line.data();
  const char* end = s + line.size();
  while (s < end && (end[-1] == '\r' || end[-1] == '\n')) --end;
  while (s <= end) {
    const char* comma = std::find(s, end, ',');
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s, comma, v);
    if (ec != std::errc() || ptr != comma) {
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": cannot parse numeric field '" +
                    std::string(s, comma) + "'");
    }
    out.push_back(v);
    if (comma == end) break;
    s = comma + 1;
  }
  return out;
}

}  // namespace

DataShard read_csv_shard(const std::string& path, int machine_id, bool header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (header && lineno == 1) continue;
    if (line.empty() || line == "\r") continue;
    rows.push_back(parse_csv_line(line, path, lineno));
    if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
      throw IoError(path + ":" + std::to_string(lineno) + ": row has " +
                    std::to_string(rows.back().size()) + " fields, expected " +
                    std::to_string(rows.front().size()));
    }
  }
  if (rows.empty()) throw IoError(path + ": no data rows");
  if (rows.front().size() < 2) {
    throw IoError(path + ": need a response column and at least one covariate");
  }

  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(rows.front().size()) - 1;
  DataShard shard;
  shard.machine_id = machine_id;
  shard.X.resize(n, p);
  shard.y.resize(n);
  for (int i = 0; i < n; ++i) {
    shard.y[i] = rows[i][0];
    for (int j = 0; j < p; ++j) shard.X(i, j) = rows[i][j + 1];
  }
  return shard;
}

void write_csv_shard(const std::string& path, const DataShard& shard) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  char buf[32];
  for (int i = 0; i < shard.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", shard.y[i]);
    out << buf;
    for (int j = 0; j < shard.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", shard.X(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<DataShard> read_shard_dir(const std::string& dir, bool header) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.path().extension() == ".csv") files.push_back(e.path());
  }
  if (ec) throw IoError("cannot read directory '" + dir + "'");
  if (files.empty()) throw IoError("no .csv shards in '" + dir + "'");
  std::sort(files.begin(), files.end());
  std::vector<DataShard> shards;
  for (std::size_t i = 0; i < files.size(); ++i) {
    shards.push_back(
        read_csv_shard(files[i].string(), static_cast<int>(i), header));
  }
  return shards;
}

std::vector<DataShard> split_rows(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, int m,
                                  std::optional<std::uint64_t> shuffle_seed) {
  const long n = X.rows();
  if (m < 1) throw ConfigError("split: m must be >= 1");
  if (n % m != 0) throw ConfigError("N must be divisible by m");

  std::vector<long> order(n);
  for (long i = 0; i < n; ++i) order[i] = i;
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    for (long i = n - 1; i > 0; --i) {
      const long j = long(rng.uniform() * double(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
  }

  const long block = n / m;
  std::vector<DataShard> shards(m);
  for (int i = 0; i < m; ++i) {
    shards[i].machine_id = i;
    shards[i].X.resize(block, X.cols());
    shards[i].y.resize(block);
    for (long r = 0; r < block; ++r) {
      const long src = order[i * block + r];
      shards[i].X.row(r) = X.row(src);
      shards[i].y[r] = y[src];
    }
  }
  return shards;
}

namespace {

void put_u64le(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char(v >> (8 * i));
  out.write(b, 8);
}

std::uint64_t get_u64le(std::ifstream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw IoError(path + ": truncated binary cache");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

std::uint64_t family_tag(Family f) {
  switch (f) {
    case Family::Gaussian:
      return 0;
    case Family::Bernoulli:
      return 1;
    case Family::Poisson:
      return 2;
  }
  return 0;
}

constexpr char kMagic[4] = {'D', 'V', 'S', '1'};

}  // namespace

void write_binary_cache(const std::string& path, Family family,
                        const std::vector<DataShard>& shards) {
  if (shards.empty()) throw ConfigError("binary cache: no shards");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(kMagic, 4);
  long N = 0;
  for (const auto& s : shards) N += s.n();
  put_u64le(out, family_tag(family));
  put_u64le(out, std::uint64_t(N));
  put_u64le(out, std::uint64_t(shards.front().p()));
  put_u64le(out, std::uint64_t(shards.size()));
  for (const auto& s : shards) {
    for (int i = 0; i < s.n(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &s.y[i], 8);
      put_u64le(out, bits);
      for (int j = 0; j < s.p(); ++j) {
        std::memcpy(&bits, &s.X(i, j), 8);
        put_u64le(out, bits);
      }
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

bool is_binary_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char m[4];
  return in.read(m, 4) && std::memcmp(m, kMagic, 4) == 0;
}

BinaryCache read_binary_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError(path + ": not a DVS1 binary cache");
  }
  const std::uint64_t tag = get_u64le(in, path);
  const std::uint64_t N = get_u64le(in, path);
  const std::uint64_t p = get_u64le(in, path);
  const std::uint64_t m = get_u64le(in, path);
  if (tag > 2 || m == 0 || p == 0 || N == 0 || N % m != 0) {
    throw IoError(path + ": malformed binary cache header");
  }

  BinaryCache cache;
  cache.family.kind = tag == 0   ? Family::Gaussian
                      : tag == 1 ? Family::Bernoulli
                                 : Family::Poisson;
  const long n = long(N / m);
  for (std::uint64_t i = 0; i < m; ++i) {
    DataShard s;
    s.machine_id = int(i);
    s.X.resize(n, long(p));
    s.y.resize(n);
    for (long r = 0; r < n; ++r) {
      std::uint64_t bits = get_u64le(in, path);
      std::memcpy(&s.y[r], &bits, 8);
      for (long j = 0; j < long(p); ++j) {
        bits = get_u64le(in, path);
        std::memcpy(&s.X(r, j), &bits, 8);
      }
    }
    cache.shards.push_back(std::move(s));
  }
  return cache;
}

void write_truth_json(const std::string& path, const CoefVector& truth) {
  std::ostringstream os;
  os.precision(17);
  os << "{\n  \"beta\": [";
  for (int j = 0; j < truth.size(); ++j) {
    if (j) os << ", ";
    os << truth[j];
  }
  os << "],\n  \"support\": [";
  const auto s = truth.support();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ", ";
    os << s[i] + 1;  // 1-based
  }
  os << "]\n}\n";
  write_text_file(path, os.str());
}

std::string report_csv(const std::vector<ReplicationReport>& reports) {
  std::ostringstream os;
  os << "method,SC,CF,AMS,PSR,FDR,T,failures\n";
  char buf[64];
  for (const auto& r : reports) {
    os << r.method;
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.2f,%.4f,%.4f", r.sc, r.cf,
                  r.ams, r.psr, r.fdr);
    os << buf << ',' << r.T << ',' << r.failures << '\n';
  }
  return os.str();
}

std::string scores_csv(const MarginalUtility& utility) {
  std::ostringstream os;
  os << "method,covariate,score,rank\n";
  const int p = static_cast<int>(utility.scores.size());
  std::vector<int> rank_of(p);
  for (int r = 0; r < p; ++r) rank_of[utility.ranking[r]] = r + 1;
  char buf[40];
  for (int j = 0; j < p; ++j) {
    std::snprintf(buf, sizeof buf, "%.12g", utility.scores[j]);
    os << marginal_method_name(utility.method) << ',' << j + 1 << ',' << buf
       << ',' << rank_of[j] << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace dvs
