#include <Eigen/Dense>

#include "gaitpipe/tracker.hpp"

namespace gaitpipe {

KalmanCv::KalmanCv(double x, double y, double sigma_a, double sigma_m, double initial_speed_sigma)
    : sigma_a_(sigma_a), sigma_m_(sigma_m) {
  x_ << x, y, 0.0, 0.0;
  p_.setZero();
  p_(0, 0) = p_(1, 1) = sigma_m * sigma_m;
  p_(2, 2) = p_(3, 3) = initial_speed_sigma * initial_speed_sigma;
}

void KalmanCv::predict(double dt) {
  Cov f = Cov::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;

  // Discrete white-acceleration noise, independent per axis.
  const double q = sigma_a_ * sigma_a_;
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  const double dt4 = dt3 * dt;
  Cov qm = Cov::Zero();
  qm(0, 0) = qm(1, 1) = q * dt4 / 4.0;
  qm(0, 2) = qm(2, 0) = qm(1, 3) = qm(3, 1) = q * dt3 / 2.0;
  qm(2, 2) = qm(3, 3) = q * dt2;

  x_ = f * x_;
  p_ = f * p_ * f.transpose() + qm;
  p_ = 0.5 * (p_ + p_.transpose());
}

void KalmanCv::update(double mx, double my) {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Matrix2d r = Eigen::Matrix2d::Identity() * (sigma_m_ * sigma_m_);

  const Eigen::Vector2d innovation = Eigen::Vector2d(mx, my) - h * x_;
  const Eigen::Matrix2d s = h * p_ * h.transpose() + r;
  const Eigen::Matrix<double, 4, 2> k = p_ * h.transpose() * s.inverse();

  x_ += k * innovation;
  // Joseph form keeps P symmetric positive-definite under rounding.
  const Cov ikh = Cov::Identity() - k * h;
  p_ = ikh * p_ * ikh.transpose() + k * r * k.transpose();
  p_ = 0.5 * (p_ + p_.transpose());
}

void kalman_step(Track& track, KalmanCv& filter, const Detection* detection, double t) {
  const double dt = track.states.empty() ? 0.0 : t - track.states.back().t;
  if (dt > 0.0) filter.predict(dt);
  TrackState state;
  state.t = t;
  if (detection != nullptr) {
    filter.update(detection->centroid_x, detection->centroid_y);
    state.points = detection->points;
  }
  state.x = filter.state()(0);
  state.y = filter.state()(1);
  track.states.push_back(std::move(state));
}

}  // namespace gaitpipe
