#include "kfuse/warp.h"

#include <algorithm>
#include <cmath>

namespace kfuse {

void WarpPolicy::validate() const {
  if (max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be at least 1");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fixed-point tolerance must be positive");
  }
}

namespace {

int nearest_index(double coord, int extent) {
  double i = std::floor(coord + 0.5);
  i = std::clamp(i, 0.0, static_cast<double>(extent - 1));
  return static_cast<int>(i);
}

double read_channel(const std::optional<Raster>& channel, int col, int row, bool clamp) {
  if (!channel) return 0.0;
  const double v = channel->at(col, row);
  return clamp ? std::max(0.0, v) : v;
}

Detection translate(const Detection& det, double dx, double dy) {
  Detection out = det;
  out.box.x += dx;
  out.box.y += dy;
  return out;
}

}  // namespace

Displacement sample_displacement(const DisparityField& field, double x, double y,
                                 const WarpPolicy& policy) {
  if (!field.dx && !field.dy) return {};
  const int width = field.dx ? field.dx->width() : field.dy->width();
  const int height = field.dx ? field.dx->height() : field.dy->height();
  const int col = nearest_index(x, width);
  const int row = nearest_index(y, height);
  return {read_channel(field.dx, col, row, policy.clamp_nonnegative),
          read_channel(field.dy, col, row, policy.clamp_nonnegative)};
}

Detection forward_warp_box(const Detection& det, const DisparityField& field,
                           const WarpPolicy& policy) {
  const Displacement d = sample_displacement(field, det.box.x, det.box.y, policy);
  return translate(det, -d.m, -d.n);
}

Detection backward_warp_box(const Detection& det, const DisparityField& field,
                            const WarpPolicy& policy) {
  const double qx = det.box.x;
  const double qy = det.box.y;
  if (policy.backward_mode == BackwardMode::kDirectAdd) {
    const Displacement d = sample_displacement(field, qx, qy, policy);
    return translate(det, d.m, d.n);
  }

  policy.validate();
  // Solve p - d(p) = q by p_{k+1} = q + d(p_k), starting at p_0 = q.
  double px = qx;
  double py = qy;
  for (int iter = 0; iter < policy.max_iters; ++iter) {
    const Displacement d = sample_displacement(field, px, py, policy);
    const double nx = qx + d.m;
    const double ny = qy + d.n;
    const double step = std::max(std::abs(nx - px), std::abs(ny - py));
    px = nx;
    py = ny;
    if (step <= policy.tol) {
      Detection out = det;
      out.box.x = px;
      out.box.y = py;
      return out;
    }
  }
  throw Error(ErrorCode::kNonConvergence,
              "backward warp from view " + std::to_string(field.target.index()) +
                  " did not converge within " + std::to_string(policy.max_iters) +
                  " iterations");
}

std::optional<Detection> apply_border(const Detection& warped, ImageSize image,
                                      BorderMode mode, bool* changed) {
  if (changed) *changed = false;
  const BBox& b = warped.box;
  const double w = image.width;
  const double h = image.height;
  if (mode == BorderMode::kDropIfCenterOutside) {
    if (b.x < 0.0 || b.x > w || b.y < 0.0 || b.y > h) {
      if (changed) *changed = true;
      return std::nullopt;
    }
    return warped;
  }

  const double x1 = std::clamp(b.left(), 0.0, w);
  const double x2 = std::clamp(b.right(), 0.0, w);
  const double y1 = std::clamp(b.top(), 0.0, h);
  const double y2 = std::clamp(b.bottom(), 0.0, h);
  if (x1 == b.left() && x2 == b.right() && y1 == b.top() && y2 == b.bottom()) {
    return warped;
  }
  if (changed) *changed = true;
  if (!(x2 > x1) || !(y2 > y1)) return std::nullopt;
  Detection out = warped;
  out.box = BBox::from_corners(x1, y1, x2, y2);
  return out;
}

namespace {

template <typename WarpFn>
WarpedSet warp_set(std::span<const Detection> boxes, ImageSize image, BorderMode mode,
                   WarpFn&& warp) {
  WarpedSet result;
  result.boxes.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    Detection warped = warp(boxes[i]);
    bool changed = false;
    std::optional<Detection> kept = apply_border(warped, image, mode, &changed);
    if (changed) {
      result.flags.push_back(
          {i, kept ? BorderAction::kClipped : BorderAction::kDropped, warped});
    }
    if (kept) result.boxes.push_back(*kept);
  }
  return result;
}

}  // namespace

WarpedSet forward_warp_set(std::span<const Detection> boxes, const DisparityField& field,
                           ImageSize image, const WarpPolicy& policy) {
  return warp_set(boxes, image, policy.border_mode,
                  [&](const Detection& d) { return forward_warp_box(d, field, policy); });
}

WarpedSet backward_warp_set(std::span<const Detection> boxes, const DisparityField& field,
                            ImageSize image, const WarpPolicy& policy) {
  return warp_set(boxes, image, policy.border_mode,
                  [&](const Detection& d) { return backward_warp_box(d, field, policy); });
}

}  // namespace kfuse
