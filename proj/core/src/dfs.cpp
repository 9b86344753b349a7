#include "symham/dfs.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "symham/gates.hpp"

namespace symham {
namespace dfs {

namespace {

void check_even(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("dfs: qubit count must be even and >= 2");
}

std::vector<Index> walk_recursion(int n) {
  // f[two_j] = number of length-n spin-1/2 coupling walks ending at two_j
  std::vector<Index> f(static_cast<size_t>(n) + 2, 0);
  f[1] = 1;
  for (int step = 2; step <= n; ++step) {
    std::vector<Index> g(f.size(), 0);
    for (int tj = 0; tj <= step; ++tj) {
      Index acc = 0;
      if (tj >= 1) acc += f[static_cast<size_t>(tj) - 1];
      if (tj + 1 < static_cast<int>(f.size())) acc += f[static_cast<size_t>(tj) + 1];
      g[static_cast<size_t>(tj)] = acc;
    }
    f = std::move(g);
  }
  return f;
}

// eigenvalue count of S^2 in every S_z block, assembled into multiplicities
std::vector<Index> brute_force_multiplicities(int n) {
  const Index dim = Index(1) << n;
  // S^2 = c*I + sum_{i<k} SWAP_{ik}, c = 3n/4 - n(n-1)/4.  The basis splits
  // by Hamming weight (fixed S_z); diagonalize each block.
  std::vector<std::vector<Index>> blocks(static_cast<size_t>(n) + 1);
  for (Index b = 0; b < dim; ++b)
    blocks[static_cast<size_t>(std::popcount(static_cast<unsigned long long>(b)))].push_back(b);

  const double c = 0.75 * n - 0.25 * n * (n - 1);
  std::vector<Index> count_by_two_j(static_cast<size_t>(n) + 1, 0);
  for (const auto& basis : blocks) {
    const Index bd = static_cast<Index>(basis.size());
    std::map<Index, Index> where;
    for (Index k = 0; k < bd; ++k) where[basis[static_cast<size_t>(k)]] = k;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(bd, bd);
    for (Index k = 0; k < bd; ++k) {
      const Index b = basis[static_cast<size_t>(k)];
      m(k, k) += c;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const Index bi = (b >> (n - 1 - i)) & 1;
          const Index bj = (b >> (n - 1 - j)) & 1;
          if (bi == bj) {
            m(k, k) += 1.0;
          } else {
            Index swapped = b;
            swapped &= ~(Index(1) << (n - 1 - i));
            swapped &= ~(Index(1) << (n - 1 - j));
            swapped |= bj << (n - 1 - i);
            swapped |= bi << (n - 1 - j);
            m(where.at(swapped), k) += 1.0;
          }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    for (Index k = 0; k < bd; ++k) {
      const double jj = es.eigenvalues()(k);  // j(j+1)
      const double j = 0.5 * (std::sqrt(4.0 * jj + 1.0) - 1.0);
      const int two_j = static_cast<int>(std::lround(2.0 * j));
      if (std::abs(2.0 * j - two_j) > 1e-6)
        throw std::runtime_error("total-spin eigenvalue far from any j(j+1)");
      ++count_by_two_j[static_cast<size_t>(two_j)];
    }
  }
  // the eigenspace of spin j has dimension (2j+1) * mult(j)
  std::vector<Index> mult(static_cast<size_t>(n) + 1, 0);
  for (int tj = 0; tj <= n; ++tj) {
    const Index cnt = count_by_two_j[static_cast<size_t>(tj)];
    if (cnt == 0) continue;
    if (cnt % (tj + 1) != 0)
      throw std::runtime_error("total-spin eigenspace dimension not divisible by 2j+1");
    mult[static_cast<size_t>(tj)] = cnt / (tj + 1);
  }
  return mult;
}

}  // namespace

SparseOperator total_spin_squared(int n_qubits) {
  check_even(n_qubits);
  const Index dim = Index(1) << n_qubits;
  const double c = 0.75 * n_qubits - 0.25 * n_qubits * (n_qubits - 1);
  std::vector<Triplet> t;
  for (Index b = 0; b < dim; ++b) {
    t.push_back({b, b, c});
    for (int i = 0; i < n_qubits; ++i)
      for (int j = i + 1; j < n_qubits; ++j) {
        const Index bi = (b >> (n_qubits - 1 - i)) & 1;
        const Index bj = (b >> (n_qubits - 1 - j)) & 1;
        if (bi == bj) {
          t.push_back({b, b, 1.0});
        } else {
          Index swapped = b;
          swapped &= ~(Index(1) << (n_qubits - 1 - i));
          swapped &= ~(Index(1) << (n_qubits - 1 - j));
          swapped |= bj << (n_qubits - 1 - i);
          swapped |= bi << (n_qubits - 1 - j);
          t.push_back({swapped, b, 1.0});
        }
      }
  }
  return SparseOperator::from_triplets(dim, std::move(t), Symmetry::Hermitian);
}

SpinDecomposition spin_multiplicities(int n_qubits) {
  check_even(n_qubits);
  if (n_qubits > 12) throw std::length_error("spin_multiplicities: n_qubits capped at 12");
  SpinDecomposition dec;
  dec.n_qubits = n_qubits;
  dec.multiplicity = walk_recursion(n_qubits);
  dec.multiplicity.resize(static_cast<size_t>(n_qubits) + 1);

  Index total = 0;
  for (int tj = 0; tj <= n_qubits; ++tj) total += dec.mult(tj) * (tj + 1);
  if (total != (Index(1) << n_qubits))
    throw std::logic_error("spin_multiplicities: dimension sum check failed");

  if (n_qubits <= 10) {
    const std::vector<Index> brute = brute_force_multiplicities(n_qubits);
    for (int tj = 0; tj <= n_qubits; ++tj)
      if (dec.mult(tj) != brute[static_cast<size_t>(tj)])
        throw std::runtime_error("spin_multiplicities: recursion and brute force disagree at 2j=" +
                                 std::to_string(tj));
  }
  return dec;
}

namespace {

// partially coupled register, amplitudes per total-M value
struct CoupledStates {
  std::vector<Eigen::VectorXd> by_m;  // index (two_m + two_j)/2
};

// couple one more spin-1/2: two_j -> two_j + dj
CoupledStates couple(const CoupledStates& cur, int two_j, int dj, int k /* qubits so far */) {
  const int two_jp = two_j + dj;
  const Index dim = Index(1) << (k + 1);
  CoupledStates next;
  next.by_m.assign(static_cast<size_t>(two_jp) + 1, Eigen::VectorXd::Zero(dim));
  for (int two_m = -two_jp; two_m <= two_jp; two_m += 2) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    const double jj = 0.5 * two_j;
    const double mm = 0.5 * two_m;
    // |j', m> = a |j, m-1/2>|0> + b |j, m+1/2>|1>
    double a, b;
    if (dj == +1) {
      a = std::sqrt((jj + mm + 0.5) / (2.0 * jj + 1.0));
      b = std::sqrt((jj - mm + 0.5) / (2.0 * jj + 1.0));
    } else {
      a = -std::sqrt((jj - mm + 0.5) / (2.0 * jj + 1.0));
      b = std::sqrt((jj + mm + 0.5) / (2.0 * jj + 1.0));
    }
    const int two_m_low = two_m - 1;   // combines with |0> (m_q = +1/2)
    const int two_m_high = two_m + 1;  // combines with |1> (m_q = -1/2)
    if (a != 0.0 && std::abs(two_m_low) <= two_j) {
      const auto& src = cur.by_m[static_cast<size_t>((two_m_low + two_j) / 2)];
      for (Index x = 0; x < src.size(); ++x) out[2 * x] += a * src[x];
    }
    if (b != 0.0 && std::abs(two_m_high) <= two_j) {
      const auto& src = cur.by_m[static_cast<size_t>((two_m_high + two_j) / 2)];
      for (Index x = 0; x < src.size(); ++x) out[2 * x + 1] += b * src[x];
    }
    next.by_m[static_cast<size_t>((two_m + two_jp) / 2)] = std::move(out);
  }
  return next;
}

void enumerate_paths(const CoupledStates& cur, int two_j, int k, int n,
                     std::vector<Eigen::VectorXd>& columns) {
  if (k == n) {
    if (two_j == 0) columns.push_back(cur.by_m[0]);
    return;
  }
  // lexicographic order: lower intermediate spin first; prune walks that
  // cannot return to zero
  if (two_j - 1 >= 0 && two_j - 1 <= n - (k + 1))
    enumerate_paths(couple(cur, two_j, -1, k), two_j - 1, k + 1, n, columns);
  if (two_j + 1 <= n - (k + 1))
    enumerate_paths(couple(cur, two_j, +1, k), two_j + 1, k + 1, n, columns);
}

}  // namespace

EncodingIsometry singlet_basis(int n_qubits) {
  check_even(n_qubits);
  if (n_qubits > 10) throw std::length_error("singlet_basis: n_qubits capped at 10");

  CoupledStates first;
  first.by_m.resize(2);
  Eigen::VectorXd up(2), down(2);
  up << 1.0, 0.0;    // |0> carries m = +1/2
  down << 0.0, 1.0;  // |1> carries m = -1/2
  first.by_m[0] = down;
  first.by_m[1] = up;

  std::vector<Eigen::VectorXd> columns;
  enumerate_paths(first, 1, 1, n_qubits, columns);

  EncodingIsometry iso;
  iso.n_qubits = n_qubits;
  iso.two_j = 0;
  iso.v.resize(Index(1) << n_qubits, static_cast<Index>(columns.size()));
  for (size_t c = 0; c < columns.size(); ++c) iso.v.col(static_cast<Index>(c)) = columns[c];

  const Eigen::MatrixXd gram = iso.v.transpose() * iso.v;
  const double err =
      (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-12) throw std::logic_error("singlet_basis: Gram matrix deviates from identity");
  return iso;
}

EncodingIsometry encode_levels(int d_logical, int n_qubits) {
  EncodingIsometry full = singlet_basis(n_qubits);
  if (d_logical < 1 || d_logical > full.v.cols())
    throw std::invalid_argument("encode_levels: logical dimension exceeds the singlet sector");
  EncodingIsometry iso;
  iso.n_qubits = full.n_qubits;
  iso.two_j = 0;
  iso.v = full.v.leftCols(d_logical);
  return iso;
}

ComplexVector apply_uniform_rotation(const ComplexMatrix& u, const ComplexVector& state,
                                     int n_qubits) {
  ComplexVector out = state;
  for (int q = 1; q <= n_qubits; ++q) out = apply_1q(u, out, n_qubits, q);
  return out;
}

EncodedTwoSiteOperator::EncodedTwoSiteOperator(SparseOperator h_logical, EncodingIsometry isometry)
    : h_(std::move(h_logical)), iso_(std::move(isometry)) {
  const Index d = iso_.v.cols();
  if (h_.dim() != d * d)
    throw std::invalid_argument("EncodedTwoSiteOperator: operator dimension must be d^2");
  block_ = Index(1) << iso_.n_qubits;
  dim_ = block_ * block_;
}

void EncodedTwoSiteOperator::apply_to(const ComplexVector& in, ComplexVector& out) const {
  if (in.size() != dim_) throw std::invalid_argument("EncodedTwoSiteOperator: dimension mismatch");
  const Index d = iso_.v.cols();
  // view as a block_ x block_ matrix, row = the first logical block's qubits
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> rin(in.data(), block_, block_);
  const Eigen::MatrixXcd small = iso_.v.transpose() * rin * iso_.v;  // d x d

  ComplexVector s(d * d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) s[a * d + b] = small(a, b);
  const ComplexVector hs = h_.apply(s);

  Eigen::MatrixXcd tmat(d, d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) tmat(a, b) = hs[a * d + b];

  const Eigen::MatrixXcd big = iso_.v * tmat * iso_.v.transpose();
  out.resize(dim_);
  Eigen::Map<RowMat> rout(out.data(), block_, block_);
  rout = big;
}

std::shared_ptr<EncodedTwoSiteOperator> build_hr_term(const SparseOperator& h_logical,
                                                      const EncodingIsometry& isometry) {
  if (!h_logical.hermitian()) throw std::invalid_argument("build_hr_term: term must be hermitian");
  return std::make_shared<EncodedTwoSiteOperator>(h_logical, isometry);
}

namespace {

constexpr char kIsometryMagic[8] = {'s', 'y', 'm', 'h', 'a', 'm', 'V', '1'};

template <class T>
void put(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little,
                "isometry tables are little-endian on disk");
  os.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof value);
  return value;
}

}  // namespace

void write_isometry(const EncodingIsometry& iso, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_isometry: cannot open " + path);
  os.write(kIsometryMagic, sizeof kIsometryMagic);
  put<std::int32_t>(os, static_cast<std::int32_t>(iso.v.rows()));
  put<std::int32_t>(os, static_cast<std::int32_t>(iso.v.cols()));
  for (Index r = 0; r < iso.v.rows(); ++r)
    for (Index c = 0; c < iso.v.cols(); ++c) {
      if (iso.v(r, c) == 0.0) continue;
      put<std::int64_t>(os, r);
      put<std::int64_t>(os, c);
      put<double>(os, iso.v(r, c));
      put<double>(os, 0.0);  // columns are real; the slot keeps the format general
    }
  if (!os) throw std::runtime_error("write_isometry: write failed for " + path);
}

EncodingIsometry read_isometry(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_isometry: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kIsometryMagic, sizeof magic) != 0)
    throw std::runtime_error("read_isometry: bad header in " + path);
  const auto rows = get<std::int32_t>(is);
  const auto cols = get<std::int32_t>(is);
  if (rows <= 0 || cols <= 0 || (rows & (rows - 1)) != 0)
    throw std::runtime_error("read_isometry: implausible table shape");
  EncodingIsometry iso;
  iso.n_qubits = static_cast<int>(std::countr_zero(static_cast<unsigned>(rows)));
  iso.two_j = 0;
  iso.v = Eigen::MatrixXd::Zero(rows, cols);
  while (true) {
    const auto r = get<std::int64_t>(is);
    if (!is) break;
    const auto c = get<std::int64_t>(is);
    const double re = get<double>(is);
    const double im = get<double>(is);
    if (!is || r < 0 || r >= rows || c < 0 || c >= cols || im != 0.0)
      throw std::runtime_error("read_isometry: corrupt record");
    iso.v(r, c) = re;
  }
  return iso;
}

}  // namespace dfs
}  // namespace symham
