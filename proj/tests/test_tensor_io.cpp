#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "structmatch/error.hpp"
#include "structmatch/graph.hpp"
#include "structmatch/tensor_io.hpp"

using namespace structmatch;

namespace {

// Hand-rolled NPY writer mirroring what numpy.save emits for version 1.0.
std::string npy(const std::string& descr, const std::string& shape, const std::string& payload,
                const std::string& fortran = "False", char major = 1) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': " + fortran +
                     ", 'shape': " + shape + ", }";
  while ((10 + dict.size() + 1) % 64 != 0) dict.push_back(' ');
  dict.push_back('\n');
  std::string out = "\x93NUMPY";
  out.push_back(major);
  out.push_back('\0');
  out.push_back(static_cast<char>(dict.size() & 0xff));
  out.push_back(static_cast<char>(dict.size() >> 8));
  return out + dict + payload;
}

template <typename T>
std::string raw(const std::vector<T>& v) {
  return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("uniform 2x2x3 tensor decodes with N = 3") {
  const float third = 1.0f / 3.0f;
  const std::vector<float> v(12, third);
  auto t = decode_tensor(npy("<f4", "(2, 2, 3)", raw(v)));
  CHECK(t.dims() == GridDims(2, 2));
  CHECK(t.num_classes() == 3);
  CHECK(t.at(3, 2) == third);
}

TEST_CASE("encoder output matches a numpy-style header byte for byte") {
  std::vector<float> v{1, 0, 0, 1, 0.5f, 0.5f};
  ProbabilityTensor t(GridDims(1, 3), 2, v);
  CHECK(encode_tensor(t) == npy("<f4", "(1, 3, 2)", raw(v)));
  LabelMap m(GridDims(2, 2, 2), {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(encode_label_map(m) == npy("<u4", "(2, 2, 2)", raw(m.labels())));
  CHECK(encode_tensor(t).find("\n") % 64 == 63);
}

TEST_CASE("element summing to 0.9 is rejected with its index") {
  std::vector<float> v{0.5f, 0.5f, 0.6f, 0.3f};
  try {
    decode_tensor(npy("<f4", "(1, 2, 2)", raw(v)));
    FAIL("accepted an unnormalized tensor");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("unnormalized probability vector at index 1") !=
          std::string::npos);
  }
}

TEST_CASE("values within tolerance are accepted and renormalized on read") {
  std::vector<float> v{0.5f, 0.500004f};
  auto t = decode_tensor(npy("<f4", "(1, 1, 2)", raw(v)));
  CHECK(t.normalized(0, 0) + t.normalized(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.at(0, 1) == 0.500004f);
}

TEST_CASE("malformed containers are rejected") {
  const std::vector<float> v(6, 0.5f);
  CHECK(kind_of([&] { decode_tensor(npy("<f8", "(1, 3, 2)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy(">f4", "(1, 3, 2)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy("<f4", "(3, 2)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy("<f4", "(1, 1, 1, 3, 2)", raw(v))); }) ==
        ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy("<f4", "(1, 3, 2)", raw(v), "True")); }) ==
        ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy("<f4", "(1, 3, 2)", raw(v), "False", 2)); }) ==
        ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy("<f4", "(1, 4, 2)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor("not an npy file"); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_tensor(npy("<f4", "(1, 6, 1)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_label_map(npy("<i4", "(2, 3)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { decode_label_map(npy("<u4", "(6,)", raw(v))); }) == ErrorKind::Format);
  CHECK(kind_of([&] { load_tensor("/nonexistent/file.npy"); }) == ErrorKind::Io);
}

TEST_CASE("random tensors round-trip byte for byte") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const GridDims dims = oracle::random_dims(rng, 9, true);
    const std::size_t channels = 2 + oracle::pick(rng, 5);
    const auto t = oracle::random_tensor(rng, dims, channels);
    const std::string bytes = encode_tensor(t);
    const auto back = decode_tensor(bytes);
    REQUIRE(back.values() == t.values());
    REQUIRE(back.dims() == t.dims());
    REQUIRE(encode_tensor(back) == bytes);
  }
}

TEST_CASE("label maps round-trip through files") {
  std::mt19937_64 rng(12);
  const auto dir = std::filesystem::temp_directory_path() / "structmatch_tensor_io_test";
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 50; ++trial) {
    const GridDims dims = oracle::random_dims(rng, 9, true);
    std::vector<std::uint32_t> labels(dims.size());
    for (auto& l : labels) l = static_cast<std::uint32_t>(oracle::pick(rng, 20));
    const LabelMap m(dims, labels);
    save_label_map(m, dir / "m.npy");
    const auto back = load_label_map(dir / "m.npy");
    REQUIRE(back == m);
    REQUIRE(encode_label_map(back) == encode_label_map(m));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("all-zero 4x4 map is sixteen background elements") {
  const std::vector<std::uint32_t> zeros(16, 0);
  const auto m = decode_label_map(npy("<u4", "(4, 4)", raw(zeros)));
  CHECK(m.size() == 16);
  CHECK(m.max_label() == 0);
}

TEST_CASE("label 7 loads but is rejected when building a 5-class model") {
  std::vector<std::uint32_t> labels{1, 2, 3, 4, 5, 7};
  const auto m = decode_label_map(npy("<u4", "(2, 3)", raw(labels)));
  CHECK(m.max_label() == 7);
  std::vector<LabelMap> ann{m};
  CHECK_THROWS_AS(train_model_graph(ann, RelationFamily::Distance, 5), Error);
}
