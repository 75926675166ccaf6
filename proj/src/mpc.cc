// Copyright 2026 The sarplan Authors
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

#include "sarplan/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace sarplan {
namespace {

using Eigen::VectorXd;

constexpr int kBipedInputs = 2;
constexpr int kQuadInputs = 3;
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 40;
constexpr double kStepTol = 1e-10;

struct BoxResult {
  VectorXd z;
  double merit = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Box-constrained descent. Variables at a bound whose gradient points out of
// the box are held fixed; the rest take a Newton step whose Hessian is the
// symmetrized forward difference of the analytic gradient, damped until
// positive definite. A projected Armijo backtrack accepts the step, so the
// merit never increases. The unstable LIP velocity map (cosh > 1) makes the
// penalized problem too ill-conditioned for plain gradient steps; it also
// amplifies input perturbations about 10^3-fold into late velocities, so the
// difference step stays near sqrt(eps) to avoid straddling penalty kinks.
template <class Eval>
BoxResult minimize_box(const Eval& eval, const VectorXd& lo, const VectorXd& hi,
                       VectorXd z, int max_iters, double tol, double stall_tol,
                       std::vector<double>* trace) {
  const Eigen::Index n = z.size();
  z = z.cwiseMax(lo).cwiseMin(hi);
  VectorXd g(n);
  double f = eval(z, &g);
  if (trace) trace->push_back(f);
  BoxResult out;
  VectorXd zp(n), gp(n), zn(n), gn(n);
  Eigen::MatrixXd hess(n, n);
  int stalled = 0;
  for (int it = 0; it < max_iters; ++it) {
    const VectorXd pg = (z - g).cwiseMax(lo).cwiseMin(hi) - z;
    const double pg_norm = pg.lpNorm<Eigen::Infinity>();
    if (pg_norm < tol * std::max(1.0, std::abs(f))) {
      out.converged = true;
      break;
    }

    const double eps = std::min(1e-6, pg_norm);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool held = (z[i] <= lo[i] + eps && g[i] > 0.0) ||
                        (z[i] >= hi[i] - eps && g[i] < 0.0);
      if (!held) free.push_back(i);
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 1e-8 * std::max(1.0, std::abs(z[i]));
      zp = z;
      zp[i] += h;
      eval(zp, &gp);
      hess.col(i) = (gp - g) / h;
    }
    Eigen::MatrixXd hf(nf, nf);
    VectorXd gf(nf);
    for (Eigen::Index r = 0; r < nf; ++r) {
      gf[r] = g[free[r]];
      for (Eigen::Index c = 0; c < nf; ++c) {
        hf(r, c) = 0.5 * (hess(free[r], free[c]) + hess(free[c], free[r]));
      }
    }
    const double scale = std::max(1e-12, hf.diagonal().cwiseAbs().maxCoeff());
    VectorXd d = VectorXd::Zero(n);
    bool newton = false;
    for (double damping = 0.0; damping <= 1e6 * scale;
         damping = std::max(1e-10 * scale, damping * 10.0)) {
      Eigen::MatrixXd m = hf;
      m.diagonal().array() += damping;
      Eigen::LLT<Eigen::MatrixXd> llt(m);
      if (llt.info() != Eigen::Success) continue;
      const VectorXd df = llt.solve(-gf);
      if (!df.allFinite() || df.dot(gf) >= 0.0) continue;
      for (Eigen::Index r = 0; r < nf; ++r) d[free[r]] = df[r];
      newton = true;
      break;
    }
    if (!newton) d = -g;

    double fn = f;
    auto line_search = [&](const VectorXd& dir) {
      double alpha = 1.0;
      for (int ls = 0; ls < kMaxBacktracks; ++ls) {
        zn = (z + alpha * dir).cwiseMax(lo).cwiseMin(hi);
        const double decrease = g.dot(z - zn);
        if (decrease <= 0.0 || (zn - z).squaredNorm() == 0.0) {
          alpha *= 0.5;
          continue;
        }
        fn = eval(zn, &gn);
        if (fn <= f - kArmijo * decrease) return true;
        alpha *= 0.5;
      }
      return false;
    };
    // The difference Hessian is unreliable across penalty kinks; fall back
    // to a projected gradient step scaled to the Newton step length.
    bool accepted = line_search(d);
    if (!accepted) {
      const double gnorm = g.norm();
      if (gnorm > 0.0) accepted = line_search(-g * (std::max(d.norm(), 1e-3) / gnorm));
    }
    ++out.iterations;
    if (!accepted) {
      // A Newton step below the resolution of z means the iterate is
      // stationary to working precision; the remaining gradient comes from
      // penalty curvature near 1e10.
      out.converged =
          newton && d.lpNorm<Eigen::Infinity>() <=
                        kStepTol * std::max(1.0, z.lpNorm<Eigen::Infinity>());
      break;
    }
    stalled = (f - fn) <= stall_tol * std::max(1.0, std::abs(f)) ? stalled + 1 : 0;
    z = zn;
    g = gn;
    f = fn;
    if (trace) trace->push_back(f);
    if (stalled >= 3) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    const VectorXd pg = (z - g).cwiseMax(lo).cwiseMin(hi) - z;
    out.converged = pg.lpNorm<Eigen::Infinity>() < tol * std::max(1.0, std::abs(f));
  }
  out.z = std::move(z);
  out.merit = f;
  return out;
}

// Cost and adjoint gradient for one biped or a distance-coupled pair.
class BipedGroup {
 public:
  BipedGroup(std::vector<const BipedAgent*> agents, const TerrainField& terrain,
             const MpcConfig& config, bool coupled)
      : agents_(std::move(agents)),
        terrain_(terrain),
        cfg_(config),
        coeff_(config.lip),
        coupled_(coupled),
        n_(config.horizon),
        use_slope_(config.slope_weight > 0.0 && !terrain.model().empty()) {}

  int size() const {
    return static_cast<int>(agents_.size()) * n_ * kBipedInputs;
  }
  void set_penalty(double rho) { rho_ = rho; }
  double penalty() const { return rho_; }

  void bounds(VectorXd& lo, VectorXd& hi) const {
    lo.resize(size());
    hi.resize(size());
    for (int i = 0; i < size(); i += kBipedInputs) {
      lo[i] = -cfg_.lip.max_foot_offset;
      hi[i] = cfg_.lip.max_foot_offset;
      lo[i + 1] = -cfg_.lip.max_heading_change;
      hi[i + 1] = cfg_.lip.max_heading_change;
    }
  }

  double operator()(const VectorXd& z, VectorXd* grad,
                    CostBreakdown* breakdown = nullptr) const {
    const std::size_t na = agents_.size();
    const int n = n_;
    // Forward pass.
    for (std::size_t a = 0; a < na; ++a) {
      Traj& t = traj_[a];
      t.resize(n);
      const LipState& s0 = agents_[a]->state;
      t.x[0] = s0.position.x();
      t.y[0] = s0.position.y();
      t.v[0] = s0.velocity;
      t.th[0] = s0.heading;
      for (int q = 0; q < n; ++q) {
        const double uf = z[idx(a, q)];
        const double dth = z[idx(a, q) + 1];
        const double travel =
            coeff_.travel_foot * uf + coeff_.travel_velocity * t.v[q];
        t.travel[q] = travel;
        t.x[q + 1] = t.x[q] + travel * std::cos(t.th[q]);
        t.y[q + 1] = t.y[q] + travel * std::sin(t.th[q]);
        t.v[q + 1] =
            coeff_.velocity_velocity * t.v[q] + coeff_.velocity_foot * uf;
        t.th[q + 1] = t.th[q] + dth;
      }
    }

    CostBreakdown cb;
    // Stage costs and their partials (index q = 1..n).
    for (std::size_t a = 0; a < na; ++a) {
      Traj& t = traj_[a];
      const BipedAgent& ag = *agents_[a];
      for (int q = 1; q <= n; ++q) {
        double gx = 0.0, gy = 0.0, gv = 0.0, gth = 0.0;
        const double ex = t.x[q] - ag.target.x();
        const double ey = t.y[q] - ag.target.y();
        cb.tracking += ag.tracking_weight * (ex * ex + ey * ey);
        gx += 2.0 * ag.tracking_weight * ex;
        gy += 2.0 * ag.tracking_weight * ey;

        if (use_slope_) {
          const Vec2 p(t.x[q], t.y[q]);
          const double c = std::cos(t.th[q]);
          const double s = std::sin(t.th[q]);
          Eigen::Matrix2d hess;
          const Vec2 sg = grad ? terrain_.model().predict_mean_gradient(p, hess)
                               : terrain_.model().predict_mean_gradient(p);
          const double lat = -s * sg.x() + c * sg.y();
          cb.slope += cfg_.slope_weight * lat * lat;
          if (grad) {
            const double k = 2.0 * cfg_.slope_weight * lat;
            gth += k * (-c * sg.x() - s * sg.y());
            gx += k * (-s * hess(0, 0) + c * hess(1, 0));
            gy += k * (-s * hess(0, 1) + c * hess(1, 1));
          }
        }

        const double over = std::abs(t.v[q]) - cfg_.biped_max_speed;
        if (over > 0.0) {
          cb.state_penalty += cfg_.state_penalty * over * over;
          gv += 2.0 * cfg_.state_penalty * over * (t.v[q] > 0 ? 1.0 : -1.0);
        }
        const Bounds& b = cfg_.bounds;
        auto box = [&](double val, double lo, double hi, double& gacc) {
          if (val < lo) {
            cb.state_penalty += cfg_.state_penalty * (lo - val) * (lo - val);
            gacc += -2.0 * cfg_.state_penalty * (lo - val);
          } else if (val > hi) {
            cb.state_penalty += cfg_.state_penalty * (val - hi) * (val - hi);
            gacc += 2.0 * cfg_.state_penalty * (val - hi);
          }
        };
        box(t.x[q], b.min_x, b.max_x, gx);
        box(t.y[q], b.min_y, b.max_y, gy);

        t.gx[q] = gx;
        t.gy[q] = gy;
        t.gv[q] = gv;
        t.gth[q] = gth;
      }
    }

    if (coupled_ && na == 2) {
      const double lo = cfg_.distance_lower - cfg_.distance_slack;
      const double hi = cfg_.distance_upper + cfg_.distance_slack;
      Traj& t1 = traj_[0];
      Traj& t2 = traj_[1];
      for (int q = 1; q <= n; ++q) {
        const double dx = t1.x[q] - t2.x[q];
        const double dy = t1.y[q] - t2.y[q];
        const double d = std::hypot(dx, dy);
        const double vlo = std::max(0.0, lo - d);
        const double vhi = std::max(0.0, d - hi);
        cb.distance_penalty += rho_ * (vlo * vlo + vhi * vhi);
        if (vlo > 0.0 || vhi > 0.0) {
          const double dd = rho_ * (-2.0 * vlo + 2.0 * vhi);
          const double ux = d > 1e-12 ? dx / d : 1.0;
          const double uy = d > 1e-12 ? dy / d : 0.0;
          t1.gx[q] += dd * ux;
          t1.gy[q] += dd * uy;
          t2.gx[q] -= dd * ux;
          t2.gy[q] -= dd * uy;
        }
      }
    }

    for (std::size_t a = 0; a < na; ++a) {
      for (int q = 0; q < n; ++q) {
        const double uf = z[idx(a, q)];
        const double dth = z[idx(a, q) + 1];
        cb.input += cfg_.input_weight * (uf * uf + dth * dth);
      }
    }

    if (grad) {
      grad->resize(size());
      for (std::size_t a = 0; a < na; ++a) {
        const Traj& t = traj_[a];
        double lx = t.gx[n], ly = t.gy[n], lv = t.gv[n], lth = t.gth[n];
        for (int q = n - 1; q >= 0; --q) {
          const double c = std::cos(t.th[q]);
          const double s = std::sin(t.th[q]);
          const double uf = z[idx(a, q)];
          const double dth = z[idx(a, q) + 1];
          (*grad)[idx(a, q)] = lx * coeff_.travel_foot * c +
                               ly * coeff_.travel_foot * s +
                               lv * coeff_.velocity_foot +
                               2.0 * cfg_.input_weight * uf;
          (*grad)[idx(a, q) + 1] = lth + 2.0 * cfg_.input_weight * dth;
          const double nlv = lx * coeff_.travel_velocity * c +
                             ly * coeff_.travel_velocity * s +
                             lv * coeff_.velocity_velocity;
          const double nlth =
              lx * (-t.travel[q] * s) + ly * (t.travel[q] * c) + lth;
          if (q > 0) {
            lx += t.gx[q];
            ly += t.gy[q];
            lv = nlv + t.gv[q];
            lth = nlth + t.gth[q];
          }
        }
      }
    }
    if (breakdown) *breakdown = cb;
    return cb.total();
  }

  VectorXd heuristic() const {
    VectorXd z(size());
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      const BipedAgent& ag = *agents_[a];
      double x = ag.state.position.x(), y = ag.state.position.y();
      double v = ag.state.velocity, th = ag.state.heading;
      for (int q = 0; q < n_; ++q) {
        const Vec2 to = ag.target - Vec2(x, y);
        const double dist = to.norm();
        double dth = 0.0;
        if (dist > 1e-6) {
          dth = std::clamp(wrap_angle(std::atan2(to.y(), to.x()) - th),
                           -cfg_.lip.max_heading_change,
                           cfg_.lip.max_heading_change);
        }
        const double v_des =
            std::min(0.9 * cfg_.biped_max_speed, 0.5 * dist);
        const double uf = std::clamp(
            (v_des - coeff_.velocity_velocity * v) / coeff_.velocity_foot,
            -cfg_.lip.max_foot_offset, cfg_.lip.max_foot_offset);
        z[idx(a, q)] = uf;
        z[idx(a, q) + 1] = dth;
        const double travel = coeff_.travel_foot * uf + coeff_.travel_velocity * v;
        x += travel * std::cos(th);
        y += travel * std::sin(th);
        v = coeff_.velocity_velocity * v + coeff_.velocity_foot * uf;
        th += dth;
      }
    }
    return z;
  }

  double distance_residual(const VectorXd& z) const {
    if (!coupled_ || agents_.size() != 2) return 0.0;
    (*this)(z, nullptr);
    const double lo = cfg_.distance_lower - cfg_.distance_slack;
    const double hi = cfg_.distance_upper + cfg_.distance_slack;
    double worst = 0.0;
    for (int q = 1; q <= n_; ++q) {
      const double d = std::hypot(traj_[0].x[q] - traj_[1].x[q],
                                  traj_[0].y[q] - traj_[1].y[q]);
      worst = std::max({worst, lo - d, d - hi});
    }
    return worst;
  }

  int idx(std::size_t agent, int q) const {
    return (static_cast<int>(agent) * n_ + q) * kBipedInputs;
  }

 private:
  struct Traj {
    std::vector<double> x, y, v, th, travel, gx, gy, gv, gth;
    void resize(int n) {
      for (auto* vec : {&x, &y, &v, &th, &gx, &gy, &gv, &gth}) {
        vec->assign(static_cast<std::size_t>(n + 1), 0.0);
      }
      travel.assign(static_cast<std::size_t>(n), 0.0);
    }
  };

  std::vector<const BipedAgent*> agents_;
  const TerrainField& terrain_;
  const MpcConfig& cfg_;
  LipCoefficients coeff_;
  bool coupled_;
  int n_;
  bool use_slope_;
  double rho_ = 0.0;
  mutable std::vector<Traj> traj_{2};
};

class QuadGroup {
 public:
  QuadGroup(const QuadAgent& agent, const MpcConfig& config)
      : agent_(agent), cfg_(config), c_(config.quad), n_(config.horizon) {}

  int size() const { return n_ * kQuadInputs; }

  void bounds(VectorXd& lo, VectorXd& hi) const {
    lo.resize(size());
    hi.resize(size());
    for (int i = 0; i < size(); i += kQuadInputs) {
      lo[i] = lo[i + 1] = -cfg_.quad.max_attitude;
      hi[i] = hi[i + 1] = cfg_.quad.max_attitude;
      lo[i + 2] = cfg_.quad.min_thrust;
      hi[i + 2] = cfg_.quad.max_thrust;
    }
  }

  VectorXd hover() const {
    VectorXd z = VectorXd::Zero(size());
    for (int q = 0; q < n_; ++q) z[q * kQuadInputs + 2] = c_.gravity;
    return z;
  }

  double operator()(const VectorXd& z, VectorXd* grad,
                    CostBreakdown* breakdown = nullptr) const {
    const int n = n_;
    // Per axis arrays: p, v, att (att unused for z).
    for (int ax = 0; ax < 3; ++ax) {
      p_[ax].assign(n + 1, 0.0);
      v_[ax].assign(n + 1, 0.0);
      att_[ax].assign(n + 1, 0.0);
      gp_[ax].assign(n + 1, 0.0);
      gv_[ax].assign(n + 1, 0.0);
      p_[ax][0] = agent_.state.position[ax];
      v_[ax][0] = agent_.state.velocity[ax];
      if (ax < 2) att_[ax][0] = agent_.state.attitude[ax];
    }
    const double h = c_.step;
    for (int q = 0; q < n; ++q) {
      for (int ax = 0; ax < 2; ++ax) {
        const double cmd = z[q * kQuadInputs + ax];
        const double att = att_[ax][q];
        att_[ax][q + 1] = c_.att_att * att + c_.att_cmd * cmd;
        v_[ax][q + 1] = v_[ax][q] + c_.vel_att * att + c_.vel_cmd * cmd;
        p_[ax][q + 1] =
            p_[ax][q] + h * v_[ax][q] + c_.pos_att * att + c_.pos_cmd * cmd;
      }
      const double az = z[q * kQuadInputs + 2] - c_.gravity;
      v_[2][q + 1] = v_[2][q] + h * az;
      p_[2][q + 1] = p_[2][q] + h * v_[2][q] + 0.5 * h * h * az;
    }

    CostBreakdown cb;
    for (int q = 1; q <= n; ++q) {
      for (int ax = 0; ax < 3; ++ax) {
        const double e = p_[ax][q] - agent_.target[ax];
        cb.tracking += agent_.tracking_weight * e * e;
        gp_[ax][q] = 2.0 * agent_.tracking_weight * e;
        const double over = std::abs(v_[ax][q]) - cfg_.quad_max_speed;
        if (over > 0.0) {
          cb.state_penalty += cfg_.state_penalty * over * over;
          gv_[ax][q] =
              2.0 * cfg_.state_penalty * over * (v_[ax][q] > 0 ? 1.0 : -1.0);
        }
      }
    }
    for (int q = 0; q < n; ++q) {
      const double a = z[q * kQuadInputs];
      const double b = z[q * kQuadInputs + 1];
      const double t = z[q * kQuadInputs + 2] - c_.gravity;
      cb.input += cfg_.input_weight * (a * a + b * b + t * t);
    }

    if (grad) {
      grad->resize(size());
      for (int ax = 0; ax < 2; ++ax) {
        double lp = gp_[ax][n], lv = gv_[ax][n], latt = 0.0;
        for (int q = n - 1; q >= 0; --q) {
          const double cmd = z[q * kQuadInputs + ax];
          (*grad)[q * kQuadInputs + ax] = c_.pos_cmd * lp + c_.vel_cmd * lv +
                                          c_.att_cmd * latt +
                                          2.0 * cfg_.input_weight * cmd;
          const double nlatt = c_.pos_att * lp + c_.vel_att * lv + c_.att_att * latt;
          const double nlv = h * lp + lv;
          if (q > 0) {
            lp += gp_[ax][q];
            lv = nlv + gv_[ax][q];
            latt = nlatt;
          }
        }
      }
      double lp = gp_[2][n], lv = gv_[2][n];
      for (int q = n - 1; q >= 0; --q) {
        const double t = z[q * kQuadInputs + 2] - c_.gravity;
        (*grad)[q * kQuadInputs + 2] =
            0.5 * h * h * lp + h * lv + 2.0 * cfg_.input_weight * t;
        const double nlv = h * lp + lv;
        if (q > 0) {
          lp += gp_[2][q];
          lv = nlv + gv_[2][q];
        }
      }
    }
    if (breakdown) *breakdown = cb;
    return cb.total();
  }

 private:
  const QuadAgent& agent_;
  const MpcConfig& cfg_;
  QuadCoefficients c_;
  int n_;
  mutable std::vector<double> p_[3], v_[3], att_[3], gp_[3], gv_[3];
};

void accumulate(CostBreakdown& into, const CostBreakdown& c) {
  into.tracking += c.tracking;
  into.slope += c.slope;
  into.input += c.input;
  into.state_penalty += c.state_penalty;
  into.distance_penalty += c.distance_penalty;
}

std::vector<LipInput> unpack_biped(const VectorXd& z, int offset, int n) {
  std::vector<LipInput> out(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    out[q].foot_offset = z[offset + q * kBipedInputs];
    out[q].heading_change = z[offset + q * kBipedInputs + 1];
  }
  return out;
}

bool warm_fits(const std::vector<LipInput>& w, int n) {
  return static_cast<int>(w.size()) == n;
}

}  // namespace

void MpcConfig::validate() const {
  if (horizon < 1) throw InputError("mpc: horizon must be >= 1");
  if (!(distance_lower < distance_upper)) {
    throw InputError("mpc: distance_lower must be < distance_upper");
  }
  if (distance_slack < 0.0) throw InputError("mpc: distance_slack must be >= 0");
  if (slope_weight < 0.0 || input_weight < 0.0 || state_penalty < 0.0) {
    throw InputError("mpc: weights must be >= 0");
  }
  if (max_iters < 1) throw InputError("mpc: max_iters must be >= 1");
  lip.validate();
  quad.validate();
}

std::vector<LipState> rollout_biped(const LipState& initial,
                                    const std::vector<LipInput>& inputs,
                                    const TerrainField& terrain,
                                    const LipParams& params) {
  const LipCoefficients c(params);
  std::vector<LipState> states{initial};
  states.reserve(inputs.size() + 1);
  for (const LipInput& u : inputs) {
    const LipState& s = states.back();
    const double sag = terrain.slope_local(s.position.head<2>(), s.heading).sagittal;
    states.push_back(lip_step(s, u, sag, c));
  }
  return states;
}

std::vector<QuadState> rollout_quad(const QuadState& initial,
                                    const std::vector<QuadInput>& inputs,
                                    const QuadParams& params) {
  const QuadCoefficients c(params);
  std::vector<QuadState> states{initial};
  for (const QuadInput& u : inputs) states.push_back(quad_step(states.back(), u, c));
  return states;
}

double biped_merit(const std::vector<BipedAgent>& agents,
                   const std::vector<double>& z, const TerrainField& terrain,
                   const MpcConfig& config, double distance_penalty,
                   std::vector<double>* grad) {
  if (agents.empty() || agents.size() > 2) {
    throw InputError("biped_merit: need one or two agents");
  }
  std::vector<const BipedAgent*> ptrs;
  for (const BipedAgent& a : agents) ptrs.push_back(&a);
  BipedGroup group(ptrs, terrain, config, agents.size() == 2);
  group.set_penalty(distance_penalty);
  if (static_cast<int>(z.size()) != group.size()) {
    throw InputError("biped_merit: input length mismatch");
  }
  const VectorXd zz = Eigen::Map<const VectorXd>(z.data(), group.size());
  if (grad == nullptr) return group(zz, nullptr);
  VectorXd g;
  const double f = group(zz, &g);
  grad->assign(g.data(), g.data() + g.size());
  return f;
}

double quad_merit(const QuadAgent& agent, const std::vector<double>& z,
                  const MpcConfig& config, std::vector<double>* grad) {
  QuadGroup group(agent, config);
  if (static_cast<int>(z.size()) != group.size()) {
    throw InputError("quad_merit: input length mismatch");
  }
  const VectorXd zz = Eigen::Map<const VectorXd>(z.data(), group.size());
  if (grad == nullptr) return group(zz, nullptr);
  VectorXd g;
  const double f = group(zz, &g);
  grad->assign(g.data(), g.data() + g.size());
  return f;
}

CostBreakdown biped_sequence_cost(const BipedAgent& agent,
                                  const std::vector<LipInput>& inputs,
                                  const TerrainField& terrain,
                                  const MpcConfig& config) {
  if (static_cast<int>(inputs.size()) != config.horizon) {
    throw InputError("biped_sequence_cost: input length != horizon");
  }
  BipedGroup group({&agent}, terrain, config, false);
  VectorXd z(group.size());
  for (int q = 0; q < config.horizon; ++q) {
    z[q * kBipedInputs] = inputs[q].foot_offset;
    z[q * kBipedInputs + 1] = inputs[q].heading_change;
  }
  CostBreakdown cb;
  group(z, nullptr, &cb);
  return cb;
}

MpcSolution solve(const MpcProblem& problem, const MpcConfig& config,
                  const MpcWarmStart* warm) {
  config.validate();
  if (problem.terrain == nullptr) throw InputError("mpc: missing terrain");
  const TerrainField& terrain = *problem.terrain;
  const int n = config.horizon;

  MpcSolution sol;
  sol.bipeds.resize(problem.bipeds.size());
  sol.quads.resize(problem.quads.size());

  // Biped groups: the coupled pair (if any) plus singletons.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> grouped(problem.bipeds.size(), false);
  if (problem.distance_pair) {
    const auto [i, j] = *problem.distance_pair;
    if (i == j || i >= problem.bipeds.size() || j >= problem.bipeds.size()) {
      throw InputError("mpc: invalid distance pair");
    }
    groups.push_back({i, j});
    grouped[i] = grouped[j] = true;
  }
  for (std::size_t i = 0; i < problem.bipeds.size(); ++i) {
    if (!grouped[i]) groups.push_back({i});
  }

  for (const auto& members : groups) {
    std::vector<const BipedAgent*> agents;
    for (std::size_t i : members) agents.push_back(&problem.bipeds[i]);
    const bool coupled = members.size() == 2;
    BipedGroup group(agents, terrain, config, coupled);
    VectorXd lo, hi;
    group.bounds(lo, hi);

    std::vector<VectorXd> starts;
    starts.push_back(VectorXd::Zero(group.size()));
    starts.push_back(group.heuristic());
    if (warm != nullptr) {
      VectorXd w(group.size());
      bool ok = true;
      for (std::size_t a = 0; a < members.size() && ok; ++a) {
        if (members[a] >= warm->bipeds.size() ||
            !warm_fits(warm->bipeds[members[a]], n)) {
          ok = false;
          break;
        }
        const auto& seq = warm->bipeds[members[a]];
        for (int q = 0; q < n; ++q) {
          w[group.idx(a, q)] = seq[q].foot_offset;
          w[group.idx(a, q) + 1] = seq[q].heading_change;
        }
      }
      if (ok) starts.push_back(w);
    }

    if (coupled) {
      const Vec2 d0 = problem.bipeds[members[0]].state.position.head<2>() -
                      problem.bipeds[members[1]].state.position.head<2>();
      const double dist = d0.norm();
      const double violation =
          std::max(config.distance_lower - config.distance_slack - dist,
                   dist - config.distance_upper - config.distance_slack);
      if (violation > config.distance_residual_tol) {
        sol.penalty_only = true;
      }
    }

    group.set_penalty(coupled ? config.initial_distance_penalty : 0.0);
    BoxResult best;
    best.merit = std::numeric_limits<double>::infinity();
    for (const VectorXd& z0 : starts) {
      std::vector<double> trace;
      BoxResult r = minimize_box(group, lo, hi, z0, config.max_iters,
                                 config.convergence_tol, config.stall_tol, &trace);
      sol.merit_traces.push_back(std::move(trace));
      sol.iterations += r.iterations;
      if (r.merit < best.merit) best = std::move(r);
    }
    double residual = group.distance_residual(best.z);
    while (coupled && residual > config.distance_residual_tol &&
           group.penalty() < config.max_distance_penalty) {
      group.set_penalty(group.penalty() * 10.0);
      std::vector<double> trace;
      BoxResult r = minimize_box(group, lo, hi, best.z, config.max_iters,
                                 config.convergence_tol, config.stall_tol, &trace);
      sol.merit_traces.push_back(std::move(trace));
      sol.iterations += r.iterations;
      best = std::move(r);
      residual = group.distance_residual(best.z);
    }
    if (coupled) {
      sol.distance_residual = std::max(0.0, residual);
      if (residual > config.distance_residual_tol) best.converged = false;
    }
    sol.converged = sol.converged && best.converged;

    CostBreakdown cb;
    group(best.z, nullptr, &cb);
    accumulate(sol.cost, cb);
    for (std::size_t a = 0; a < members.size(); ++a) {
      BipedPlan& plan = sol.bipeds[members[a]];
      plan.inputs = unpack_biped(best.z, group.idx(a, 0), n);
      plan.states = rollout_biped(problem.bipeds[members[a]].state, plan.inputs,
                                  terrain, config.lip);
    }
  }

  for (std::size_t i = 0; i < problem.quads.size(); ++i) {
    QuadGroup group(problem.quads[i], config);
    VectorXd lo, hi;
    group.bounds(lo, hi);
    std::vector<VectorXd> starts{group.hover()};
    if (warm != nullptr && i < warm->quads.size() &&
        static_cast<int>(warm->quads[i].size()) == n) {
      VectorXd w(group.size());
      for (int q = 0; q < n; ++q) {
        w[q * kQuadInputs] = warm->quads[i][q].desired_pitch;
        w[q * kQuadInputs + 1] = warm->quads[i][q].desired_roll;
        w[q * kQuadInputs + 2] = warm->quads[i][q].vertical_thrust;
      }
      starts.push_back(w);
    }
    BoxResult best;
    best.merit = std::numeric_limits<double>::infinity();
    for (const VectorXd& z0 : starts) {
      std::vector<double> trace;
      BoxResult r = minimize_box(group, lo, hi, z0, config.max_iters,
                                 config.convergence_tol, config.stall_tol, &trace);
      sol.merit_traces.push_back(std::move(trace));
      sol.iterations += r.iterations;
      if (r.merit < best.merit) best = std::move(r);
    }
    sol.converged = sol.converged && best.converged;
    CostBreakdown cb;
    group(best.z, nullptr, &cb);
    accumulate(sol.cost, cb);
    QuadPlan& plan = sol.quads[i];
    plan.inputs.resize(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
      plan.inputs[q] = {best.z[q * kQuadInputs], best.z[q * kQuadInputs + 1],
                        best.z[q * kQuadInputs + 2]};
    }
    plan.states = rollout_quad(problem.quads[i].state, plan.inputs, config.quad);
  }
  return sol;
}

MpcWarmStart shift_solution(const MpcSolution& solution) {
  MpcWarmStart w;
  for (const BipedPlan& p : solution.bipeds) {
    auto seq = p.inputs;
    if (!seq.empty()) {
      seq.erase(seq.begin());
      seq.push_back(seq.empty() ? LipInput{} : seq.back());
    }
    w.bipeds.push_back(std::move(seq));
  }
  for (const QuadPlan& p : solution.quads) {
    auto seq = p.inputs;
    if (!seq.empty()) {
      seq.erase(seq.begin());
      seq.push_back(seq.empty() ? QuadInput{} : seq.back());
    }
    w.quads.push_back(std::move(seq));
  }
  return w;
}

RecedingHorizonController::RecedingHorizonController(MpcConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

RecedingStepResult RecedingHorizonController::step(
    Fleet& fleet, const FleetTargets& targets, const TerrainField& terrain) {
  if (targets.bipeds.size() != fleet.bipeds.size() ||
      targets.quads.size() != fleet.quads.size()) {
    throw InputError("receding step: target count mismatch");
  }
  MpcProblem problem;
  problem.terrain = &terrain;
  problem.distance_pair = targets.distance_pair;
  for (std::size_t i = 0; i < fleet.bipeds.size(); ++i) {
    problem.bipeds.push_back({fleet.bipeds[i], targets.bipeds[i], 1.0});
  }
  for (std::size_t i = 0; i < fleet.quads.size(); ++i) {
    problem.quads.push_back({fleet.quads[i], targets.quads[i], 1.0});
  }

  RecedingStepResult out;
  out.solution = solve(problem, config_, warm_ ? &*warm_ : nullptr);
  for (std::size_t i = 0; i < fleet.bipeds.size(); ++i) {
    const LipInput u = out.solution.bipeds[i].inputs.front();
    LipState& s = fleet.bipeds[i];
    const double sag = terrain.slope_local(s.position.head<2>(), s.heading).sagittal;
    s = lip_step(s, u, sag, config_.lip);
    out.biped_inputs.push_back(u);
    out.biped_lateral_slopes.push_back(
        terrain.lateral_slope(s.position.head<2>(), s.heading));
  }
  for (std::size_t i = 0; i < fleet.quads.size(); ++i) {
    const QuadInput u = out.solution.quads[i].inputs.front();
    const QuadStepResult r = quad_step(fleet.quads[i], u, config_.quad);
    fleet.quads[i] = r.state;
    out.quad_envelope_clamped |= r.envelope_clamped;
    out.quad_inputs.push_back(u);
  }
  warm_ = shift_solution(out.solution);
  return out;
}

}  // namespace sarplan
