#include "icpl/dataio.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "icpl/errors.hpp"

namespace icpl::data {

int LabeledDataset::num_classes() const {
  int maxc = -1;
  for (int c : labels) maxc = std::max(maxc, c);
  return maxc + 1;
}

void LabeledDataset::validate() const {
  if (samples.rows() != static_cast<Eigen::Index>(labels.size()))
    throw ShapeError("dataset: sample/label count mismatch");
  if (!samples.allFinite())
    throw ArgumentError("dataset: non-finite feature values");
  for (int c : labels)
    if (c < 0) throw ArgumentError("dataset: negative class id");
}

std::pair<LabeledDataset, LabeledDataset> synth_gaussian(
    int num_classes, int per_class, int dim, Scalar center_scale,
    Scalar noise_std, std::uint64_t seed, Scalar test_fraction) {
  if (num_classes < 1 || per_class < 1 || dim < 1)
    throw ArgumentError("synth_gaussian: counts and dim must be positive");
  if (center_scale < 0 || noise_std < 0)
    throw ArgumentError("synth_gaussian: scales must be non-negative");
  if (test_fraction < 0 || test_fraction >= 1)
    throw ArgumentError("synth_gaussian: test_fraction must be in [0,1)");

  Rng rng = make_rng(seed);
  Matrix centers(num_classes, dim);
  for (int c = 0; c < num_classes; ++c)
    for (int j = 0; j < dim; ++j)
      centers(c, j) = uniform_in(rng, -center_scale, center_scale);

  const int n_test = static_cast<int>(std::floor(per_class * test_fraction));
  const int n_train = per_class - n_test;

  LabeledDataset train, test;
  train.split = Split::Train;
  test.split = Split::Test;
  train.samples.resize(static_cast<Eigen::Index>(num_classes) * n_train, dim);
  test.samples.resize(static_cast<Eigen::Index>(num_classes) * n_test, dim);
  train.labels.reserve(train.samples.rows());
  test.labels.reserve(test.samples.rows());

  Eigen::Index tr = 0, te = 0;
  for (int c = 0; c < num_classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      RowVector x(dim);
      for (int j = 0; j < dim; ++j)
        x(j) = centers(c, j) + noise_std * normal01(rng);
      if (i < n_train) {
        train.samples.row(tr++) = x;
        train.labels.push_back(c);
      } else {
        test.samples.row(te++) = x;
        test.labels.push_back(c);
      }
    }
  }
  return {std::move(train), std::move(test)};
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

Scalar parse_real(const std::string& s, long line) {
  try {
    std::size_t pos = 0;
    const Scalar v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("trailing characters in '" + s + "'", line);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("non-numeric cell '" + s + "'", line);
  }
}

std::uint32_t read_be32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("idx: truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file " + path.string(), 1);
  const auto header = split_fields(line);
  long label_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = static_cast<long>(i);
  if (label_idx < 0)
    throw ParseError("label column '" + label_column + "' not found", 1);

  const std::size_t n_cols = header.size();
  std::vector<std::vector<Scalar>> rows;
  Labels labels;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n_cols)
      throw ParseError("expected " + std::to_string(n_cols) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    std::vector<Scalar> row;
    row.reserve(n_cols - 1);
    for (std::size_t i = 0; i < n_cols; ++i) {
      const Scalar v = parse_real(fields[i], line_no);
      if (static_cast<long>(i) == label_idx) {
        const int c = static_cast<int>(v);
        if (static_cast<Scalar>(c) != v || c < 0)
          throw ParseError("label must be a non-negative integer", line_no);
        labels.push_back(c);
      } else {
        if (!std::isfinite(v)) throw ParseError("non-finite feature value", line_no);
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }

  LabeledDataset ds;
  ds.samples.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(n_cols - 1));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j + 1 < n_cols; ++j)
      ds.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

void save_csv(const std::filesystem::path& path, const LabeledDataset& ds,
              const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  for (Eigen::Index j = 0; j < ds.dim(); ++j) out << "f" << j << ",";
  out << label_column << "\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ds.samples(i, j) << ",";
    out << ds.labels[static_cast<std::size_t>(i)] << "\n";
  }
}

LabeledDataset load_cifar100_binary(const std::filesystem::path& path) {
  constexpr std::size_t kRecord = 3074;  // coarse + fine + 3*32*32
  constexpr std::size_t kPixels = 3072;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() % kRecord != 0)
    throw FormatError("cifar100: file length " + std::to_string(bytes.size()) +
                      " is not a multiple of 3074");

  const std::size_t n = bytes.size() / kRecord;
  LabeledDataset ds;
  ds.samples.resize(static_cast<Eigen::Index>(n), kPixels);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec =
        reinterpret_cast<const unsigned char*>(bytes.data()) + i * kRecord;
    ds.labels[i] = rec[1];  // fine label
    for (std::size_t p = 0; p < kPixels; ++p)
      ds.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          static_cast<Scalar>(rec[2 + p]) / 255.0;
  }
  return ds;
}

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
  std::ifstream imgs(images_path, std::ios::binary);
  if (!imgs) throw FormatError("cannot open " + images_path.string());
  std::ifstream labs(labels_path, std::ios::binary);
  if (!labs) throw FormatError("cannot open " + labels_path.string());

  if (read_be32(imgs) != 0x00000803u)
    throw FormatError("idx: bad image magic in " + images_path.string());
  if (read_be32(labs) != 0x00000801u)
    throw FormatError("idx: bad label magic in " + labels_path.string());

  const std::uint32_t n_imgs = read_be32(imgs);
  const std::uint32_t rows = read_be32(imgs);
  const std::uint32_t cols = read_be32(imgs);
  const std::uint32_t n_labs = read_be32(labs);
  if (n_imgs != n_labs)
    throw FormatError("idx: image count " + std::to_string(n_imgs) +
                      " != label count " + std::to_string(n_labs));

  const std::size_t npix = std::size_t(rows) * cols;
  LabeledDataset ds;
  ds.samples.resize(static_cast<Eigen::Index>(n_imgs),
                    static_cast<Eigen::Index>(npix));
  ds.labels.resize(n_imgs);
  std::vector<unsigned char> buf(npix);
  for (std::uint32_t i = 0; i < n_imgs; ++i) {
    imgs.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(npix));
    if (!imgs) throw FormatError("idx: truncated image data");
    for (std::size_t p = 0; p < npix; ++p)
      ds.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          static_cast<Scalar>(buf[p]) / 255.0;
    char lab;
    labs.read(&lab, 1);
    if (!labs) throw FormatError("idx: truncated label data");
    ds.labels[i] = static_cast<unsigned char>(lab);
  }
  return ds;
}

Standardizer Standardizer::fit(const Matrix& samples) {
  Standardizer s;
  s.mean = samples.colwise().mean();
  const RowVector var =
      (samples.rowwise() - s.mean).array().square().colwise().mean().matrix();
  s.inv_std = var.array().sqrt().inverse().matrix();
  for (Eigen::Index j = 0; j < var.size(); ++j)
    if (var(j) <= 0) s.inv_std(j) = 1.0;
  return s;
}

Matrix Standardizer::apply(const Matrix& samples) const {
  return ((samples.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
}

}  // namespace icpl::data
