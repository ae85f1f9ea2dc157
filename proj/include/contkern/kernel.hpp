#pragma once

#include <memory>

#include "contkern/ps_solver.hpp"

namespace contkern {

/// Continuum kernels (k, kbar) as differentiable functions on the prism.
class ContinuumKernel {
 public:
  virtual ~ContinuumKernel() = default;

  virtual double k(double x, double xi, double y) const = 0;
  virtual double kbar(double x, double xi) const = 0;
  virtual double k_x(double x, double xi, double y) const = 0;
  virtual double k_xi(double x, double xi, double y) const = 0;
  virtual double kbar_x(double x, double xi) const = 0;
  virtual double kbar_xi(double x, double xi) const = 0;
};

/// Power-series kernels with exact series derivatives.
class SeriesKernel final : public ContinuumKernel {
 public:
  explicit SeriesKernel(const PsKernelSolution& sol);
  SeriesKernel(TruncatedSeries k, TruncatedSeries kbar);

  double k(double x, double xi, double y) const override;
  double kbar(double x, double xi) const override;
  double k_x(double x, double xi, double y) const override;
  double k_xi(double x, double xi, double y) const override;
  double kbar_x(double x, double xi) const override;
  double kbar_xi(double x, double xi) const override;

  const TruncatedSeries& k_series() const noexcept { return k_; }
  const TruncatedSeries& kbar_series() const noexcept { return kbar_; }

 private:
  TruncatedSeries k_, kbar_, k_x_, k_xi_, kbar_x_, kbar_xi_;
};

}  // namespace contkern
