#ifndef OPMS_TESTS_TEST_UTIL_H_
#define OPMS_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "opms/error.h"
#include "opms/telemetry/dataset.h"

namespace opms::testing {

// Fails unless `expr` throws opms::Error with `code`.
#define EXPECT_OPMS_ERROR(expr, expected_code)                                   \
  do {                                                                           \
    try {                                                                        \
      (void)(expr);                                                              \
      ADD_FAILURE() << "no exception from " #expr;                               \
    } catch (const ::opms::Error& e) {                                           \
      EXPECT_EQ(e.code(), expected_code) << e.what();                            \
    }                                                                            \
  } while (0)

inline RowMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                               double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("opms_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace opms::testing

#endif  // OPMS_TESTS_TEST_UTIL_H_
