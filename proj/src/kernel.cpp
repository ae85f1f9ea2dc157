#include "contkern/kernel.hpp"

namespace contkern {

namespace {

Point pt3(double x, double xi, double y) { return Point{{VarId::X, x}, {VarId::XI, xi}, {VarId::Y, y}}; }
Point pt2(double x, double xi) { return Point{{VarId::X, x}, {VarId::XI, xi}}; }

}  // namespace

SeriesKernel::SeriesKernel(const PsKernelSolution& sol) : SeriesKernel(sol.k, sol.kbar) {}

SeriesKernel::SeriesKernel(TruncatedSeries k, TruncatedSeries kbar)
    : k_(std::move(k)),
      kbar_(std::move(kbar)),
      k_x_(diff(k_, VarId::X)),
      k_xi_(diff(k_, VarId::XI)),
      kbar_x_(diff(kbar_, VarId::X)),
      kbar_xi_(diff(kbar_, VarId::XI)) {}

double SeriesKernel::k(double x, double xi, double y) const { return eval(k_, pt3(x, xi, y)); }
double SeriesKernel::kbar(double x, double xi) const { return eval(kbar_, pt2(x, xi)); }
double SeriesKernel::k_x(double x, double xi, double y) const { return eval(k_x_, pt3(x, xi, y)); }
double SeriesKernel::k_xi(double x, double xi, double y) const { return eval(k_xi_, pt3(x, xi, y)); }
double SeriesKernel::kbar_x(double x, double xi) const { return eval(kbar_x_, pt2(x, xi)); }
double SeriesKernel::kbar_xi(double x, double xi) const { return eval(kbar_xi_, pt2(x, xi)); }

}  // namespace contkern
