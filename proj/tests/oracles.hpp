#pragma once

// Brute-force reference implementations. Deliberately naive and independent of the library.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

namespace oracle {

using Cells = std::vector<std::vector<int>>;  // [row][col]

inline Cells random_cells(std::mt19937& rng, std::size_t rows, std::size_t cols, double p_one = 0.5, int alphabet = 2) {
  Cells c(rows, std::vector<int>(cols));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> other(2, alphabet > 2 ? alphabet - 1 : 2);
  for (auto& row : c) {
    for (auto& v : row) {
      double x = u(rng);
      v = x < p_one ? 1 : (alphabet > 2 && x > 0.5 + p_one / 2 ? other(rng) : 0);
    }
  }
  return c;
}

struct Lag {
  std::size_t h;
  double gamma;
  std::size_t pairs;
};

/// Enumerates every ordered cell pair and keeps those separated by exactly h * (dr, dc).
inline std::vector<Lag> semivariogram(const Cells& c, int positive, int dr, int dc, std::size_t max_lag) {
  const long rows = static_cast<long>(c.size());
  const long cols = static_cast<long>(c[0].size());
  std::vector<Lag> out;
  for (std::size_t h = 1; h <= max_lag; ++h) {
    double sum = 0.0;
    std::size_t n = 0;
    for (long r1 = 0; r1 < rows; ++r1)
      for (long c1 = 0; c1 < cols; ++c1)
        for (long r2 = 0; r2 < rows; ++r2)
          for (long c2 = 0; c2 < cols; ++c2) {
            if (r2 - r1 != static_cast<long>(h) * dr || c2 - c1 != static_cast<long>(h) * dc) continue;
            const double a = c[r1][c1] == positive ? 1.0 : 0.0;
            const double b = c[r2][c2] == positive ? 1.0 : 0.0;
            sum += (a - b) * (a - b);
            ++n;
          }
    if (n > 0) out.push_back({h, sum / (2.0 * static_cast<double>(n)), n});
  }
  return out;
}

/// Breadth-first flood fill.
inline std::size_t geobodies(const Cells& c, int code, int connectivity) {
  const long rows = static_cast<long>(c.size());
  const long cols = static_cast<long>(c[0].size());
  std::vector<std::vector<bool>> seen(rows, std::vector<bool>(cols, false));
  std::size_t count = 0;
  for (long r = 0; r < rows; ++r) {
    for (long k = 0; k < cols; ++k) {
      if (c[r][k] != code || seen[r][k]) continue;
      ++count;
      std::deque<std::pair<long, long>> q{{r, k}};
      seen[r][k] = true;
      while (!q.empty()) {
        auto [y, x] = q.front();
        q.pop_front();
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            if (connectivity == 4 && dy != 0 && dx != 0) continue;
            long ny = y + dy, nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= rows || nx >= cols) continue;
            if (c[ny][nx] != code || seen[ny][nx]) continue;
            seen[ny][nx] = true;
            q.push_back({ny, nx});
          }
        }
      }
    }
  }
  return count;
}

/// Recounts every window from scratch. Result is [window row][window col].
inline std::vector<std::vector<double>> window_proportions(const Cells& c, int code, std::size_t w, std::size_t stride) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r + w <= c.size(); r += stride) {
    std::vector<double> row;
    for (std::size_t k = 0; k + w <= c[0].size(); k += stride) {
      std::size_t hits = 0;
      for (std::size_t i = r; i < r + w; ++i)
        for (std::size_t j = k; j < k + w; ++j) hits += c[i][j] == code;
      row.push_back(static_cast<double>(hits) / static_cast<double>(w * w));
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace oracle
