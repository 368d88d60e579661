// Copyright 2026 The taprecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/error.hpp"
#include "core/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace taprecon
{

class ShapeParser
{
public:
  explicit ShapeParser(std::string_view text) : text_(text) {}

  Shape parse_all()
  {
    Shape s = parse_shape();
    skip_space();
    if (pos_ != text_.size()) {
      error("unexpected trailing text");
    }
    return s;
  }

private:
  [[noreturn]] void error(const std::string & what) const
  {
    fail(
      ErrorCode::kInvalidArgument,
      "bad shape descriptor '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool peek(char c)
  {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c)
  {
    if (!peek(c)) {
      error(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  std::string identifier()
  {
    skip_space();
    std::string id;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      id.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_++]))));
    }
    return id;
  }

  double number()
  {
    skip_space();
    const char * begin = text_.data() + pos_;
    const char * end = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || !std::isfinite(value)) {
      error("expected a number");
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  Shape parse_shape()
  {
    const std::string name = identifier();
    if (name.empty()) {
      error("expected a shape name");
    }
    Shape s;
    if (name == "disk" || name == "circle") {
      s.kind_ = Shape::Kind::kDisk;
    } else if (name == "rectangle" || name == "rect") {
      s.kind_ = Shape::Kind::kRectangle;
    } else if (name == "ring") {
      s.kind_ = Shape::Kind::kRing;
    } else if (name == "cross") {
      s.kind_ = Shape::Kind::kCross;
    } else if (name == "polyline" || name == "stroke") {
      s.kind_ = Shape::Kind::kPolyline;
    } else if (name == "composite" || name == "union") {
      s.kind_ = Shape::Kind::kComposite;
    } else {
      error("unknown shape '" + name + "'");
    }

    expect('(');
    if (s.kind_ == Shape::Kind::kComposite) {
      if (peek(')')) {
        error("composite needs at least one part");
      }
      s.parts_.push_back(parse_shape());
      while (peek(',')) {
        ++pos_;
        s.parts_.push_back(parse_shape());
      }
    } else if (!peek(')')) {
      s.params_.push_back(number());
      while (peek(',')) {
        ++pos_;
        s.params_.push_back(number());
      }
    }
    expect(')');
    check_arity(s, name);
    return s;
  }

  void check_arity(const Shape & s, const std::string & name) const
  {
    const std::size_t n = s.params_.size();
    bool ok = true;
    switch (s.kind_) {
      case Shape::Kind::kDisk:
        ok = n == 3 && s.params_[2] > 0.0;
        break;
      case Shape::Kind::kRectangle:
      case Shape::Kind::kCross:
        ok = (n == 4 || n == 5) && s.params_[2] > 0.0 && s.params_[3] > 0.0;
        break;
      case Shape::Kind::kRing:
        ok = n == 4 && s.params_[2] > s.params_[3] && s.params_[3] >= 0.0;
        break;
      case Shape::Kind::kPolyline:
        ok = n >= 5 && n % 2 == 1 && s.params_[0] > 0.0;
        break;
      case Shape::Kind::kComposite:
        ok = !s.parts_.empty();
        break;
    }
    if (!ok) {
      error("wrong or invalid arguments for " + name);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Shape Shape::parse(std::string_view descriptor)
{
  bool blank = true;
  for (char c : descriptor) {
    blank = blank && std::isspace(static_cast<unsigned char>(c));
  }
  require(!blank, ErrorCode::kInvalidArgument, "empty shape descriptor");
  return ShapeParser(descriptor).parse_all();
}

namespace
{

bool in_box(const Eigen::Vector2d & p, double cx, double cy, double w, double h, double angle_deg)
{
  const double a = -angle_deg * std::numbers::pi / 180.0;
  const double dx = p.x() - cx;
  const double dy = p.y() - cy;
  const double lx = std::cos(a) * dx - std::sin(a) * dy;
  const double ly = std::sin(a) * dx + std::cos(a) * dy;
  return std::abs(lx) <= 0.5 * w && std::abs(ly) <= 0.5 * h;
}

double segment_distance2(const Eigen::Vector2d & p, const Eigen::Vector2d & a, const Eigen::Vector2d & b)
{
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).squaredNorm();
}

}  // namespace

bool Shape::contains(const Eigen::Vector2d & p) const
{
  const auto & q = params_;
  switch (kind_) {
    case Kind::kDisk:
      return (p - Eigen::Vector2d(q[0], q[1])).squaredNorm() <= q[2] * q[2];
    case Kind::kRectangle:
      return in_box(p, q[0], q[1], q[2], q[3], q.size() > 4 ? q[4] : 0.0);
    case Kind::kRing: {
      const double d2 = (p - Eigen::Vector2d(q[0], q[1])).squaredNorm();
      return d2 <= q[2] * q[2] && d2 >= q[3] * q[3];
    }
    case Kind::kCross: {
      const double angle = q.size() > 4 ? q[4] : 0.0;
      return in_box(p, q[0], q[1], q[2], q[3], angle) || in_box(p, q[0], q[1], q[3], q[2], angle);
    }
    case Kind::kPolyline: {
      const double half = 0.5 * q[0];
      for (std::size_t i = 1; i + 3 < q.size(); i += 2) {
        const Eigen::Vector2d a(q[i], q[i + 1]);
        const Eigen::Vector2d b(q[i + 2], q[i + 3]);
        if (segment_distance2(p, a, b) <= half * half) {
          return true;
        }
      }
      return false;
    }
    case Kind::kComposite:
      for (const auto & part : parts_) {
        if (part.contains(p)) {
          return true;
        }
      }
      return false;
  }
  return false;
}

}  // namespace taprecon
