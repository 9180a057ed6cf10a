#ifndef OUTLOOK_TESTS_SUPPORT_HPP_
#define OUTLOOK_TESTS_SUPPORT_HPP_

#include "outlook/calendar.hpp"
#include "outlook/common.hpp"

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace test
{

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
 public:
  TempDir()
  {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("outlook-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline outlook::Date date(int y, unsigned m, unsigned d)
{
  return std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d};
}

inline outlook::MatrixX<double> gaussian(Eigen::Index rows, Eigen::Index cols, outlook::Rng& rng)
{
  outlook::MatrixX<double> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = outlook::standard_normal(rng);
  return m;
}

}  // namespace test

#endif  // OUTLOOK_TESTS_SUPPORT_HPP_
