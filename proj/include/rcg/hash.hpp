#pragma once

#include <string>
#include <string_view>

namespace rcg {

/// Incremental SHA-256; hex() finalizes.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::string_view bytes);
  Sha256& update(const void* data, std::size_t size);
  std::string hex();

 private:
  struct State;
  State* state_;
};

std::string sha256_hex(std::string_view bytes);

}  // namespace rcg
