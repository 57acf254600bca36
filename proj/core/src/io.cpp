#include "iat/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace iat {

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian");

constexpr std::array<char, 8> kMatrixMagic{'I', 'A', 'T', 'M', 'A', 'T', 'R', 'X'};
constexpr std::array<char, 8> kArnoldiMagic{'I', 'A', 'T', 'A', 'R', 'N', 'L', 'D'};
// Refuse absurd headers before allocating.
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 31;

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw FormatError(std::string("truncated header: ") + what);
  }
  return v;
}

void get_f64(std::istream& in, double* data, std::size_t count, const char* what) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)))) {
    throw FormatError(std::string("truncated payload: ") + what);
  }
}

void check_magic(std::istream& in, const std::array<char, 8>& magic, const char* what) {
  std::array<char, 8> got{};
  if (!in.read(got.data(), got.size()) || got != magic) {
    throw FormatError(std::string("bad magic for ") + what);
  }
}

Index read_size_header(std::istream& in, const char* what) {
  long long n = 0;
  if (!(in >> n)) throw FormatError(std::string("missing size header in ") + what);
  if (n < 1) throw FormatError(std::string("size header must be positive in ") + what);
  return static_cast<Index>(n);
}

double read_value(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw FormatError("unexpected end of data");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + token + "'");
  }
  if (used != token.size()) throw FormatError("not a number: '" + token + "'");
  return v;
}

void write_full(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

}  // namespace

void write_matrix_text(std::ostream& out, const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) throw ArgumentError("write_matrix_text: matrix must be square");
  out << m.rows() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      write_full(out, m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_binary(std::ostream& out, const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) throw ArgumentError("write_matrix_binary: matrix must be square");
  out.write(kMatrixMagic.data(), kMatrixMagic.size());
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  const Matrix copy = m;
  put_f64(out, copy.data(), static_cast<std::size_t>(copy.size()));
}

Matrix read_matrix(std::istream& in) {
  if (in.peek() == kMatrixMagic[0]) {
    check_magic(in, kMatrixMagic, "binary matrix");
    const std::uint64_t n = get_u64(in, "n");
    if (n == 0 || n > kMaxEntries / n) throw FormatError("binary matrix: implausible size");
    Matrix m(static_cast<Index>(n), static_cast<Index>(n));
    get_f64(in, m.data(), static_cast<std::size_t>(n * n), "matrix entries");
    return m;
  }
  const Index n = read_size_header(in, "matrix file");
  if (static_cast<std::uint64_t>(n) > kMaxEntries / static_cast<std::uint64_t>(n)) {
    throw FormatError("matrix file: implausible size");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = read_value(in);
  }
  std::string extra;
  if (in >> extra) throw FormatError("matrix file: trailing data after " + std::to_string(n) + " rows");
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matrix(in);
}

std::shared_ptr<const DenseOperator> load_dense_operator(const std::filesystem::path& path) {
  return std::make_shared<const DenseOperator>(read_matrix(path));
}

void write_vector_text(std::ostream& out, const Eigen::Ref<const Vector>& v) {
  out << v.size() << '\n';
  for (Index k = 0; k < v.size(); ++k) {
    write_full(out, v(k));
    out << '\n';
  }
}

Vector read_vector_text(std::istream& in) {
  const Index n = read_size_header(in, "vector file");
  if (static_cast<std::uint64_t>(n) > kMaxEntries) throw FormatError("vector file: implausible size");
  Vector v(n);
  for (Index k = 0; k < n; ++k) v(k) = read_value(in);
  std::string extra;
  if (in >> extra) throw FormatError("vector file: trailing data");
  return v;
}

Vector read_vector(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vector_text(in);
}

void write_decomposition(std::ostream& out, const ArnoldiDecomposition& dec) {
  out.write(kArnoldiMagic.data(), kArnoldiMagic.size());
  put_u64(out, static_cast<std::uint64_t>(dec.basis.rows()));
  put_u64(out, static_cast<std::uint64_t>(dec.steps));
  put_u64(out, static_cast<std::uint64_t>(dec.basis.cols()));
  put_u64(out, dec.breakdown ? 1u : 0u);
  put_f64(out, &dec.beta, 1);
  put_f64(out, dec.basis.data(), static_cast<std::size_t>(dec.basis.size()));
  put_f64(out, dec.hessenberg.data(), static_cast<std::size_t>(dec.hessenberg.size()));
}

ArnoldiDecomposition read_decomposition(std::istream& in) {
  check_magic(in, kArnoldiMagic, "decomposition");
  const std::uint64_t n = get_u64(in, "n");
  const std::uint64_t steps = get_u64(in, "steps");
  const std::uint64_t cols = get_u64(in, "basis_cols");
  const std::uint64_t flags = get_u64(in, "flags");
  if (n == 0 || steps == 0 || steps > n || (cols != steps && cols != steps + 1) ||
      n > kMaxEntries / cols) {
    throw FormatError("decomposition: inconsistent header");
  }
  if ((flags & ~std::uint64_t{1}) != 0) throw FormatError("decomposition: unknown flags");
  ArnoldiDecomposition dec;
  dec.steps = static_cast<Index>(steps);
  dec.breakdown = (flags & 1u) != 0;
  get_f64(in, &dec.beta, 1, "beta");
  dec.basis.resize(static_cast<Index>(n), static_cast<Index>(cols));
  get_f64(in, dec.basis.data(), static_cast<std::size_t>(n * cols), "basis");
  dec.hessenberg.resize(static_cast<Index>(steps + 1), static_cast<Index>(steps));
  get_f64(in, dec.hessenberg.data(), static_cast<std::size_t>((steps + 1) * steps), "hessenberg");
  return dec;
}

}  // namespace iat
