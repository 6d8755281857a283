// Walks through the toy example: data -> derivative estimates -> polynomial system -> RUR -> estimates.
#include <iostream>

#include "paramcert/paramcert.hpp"

using namespace paramcert;

int main() {
  Model model = parse_model(R"(
states: x
params: mu
dynamics:
  x' = -mu*x
outputs:
  y = x^2 + x
)");
  Dataset data = parse_dataset("t,y\n0.00,2.00\n0.33,1.56\n0.66,1.23\n1.00,0.97\n", model);

  auto ip = fit_interpolant(data, 0, InterpKind::polynomial);
  auto d = estimate_derivatives(ip, 0, 2);
  std::cout << "derivative estimates at t=0:";
  for (const auto& v : d) std::cout << " " << to_double(v);
  std::cout << "\n\n";

  std::vector<int> orders{2};
  PolySystem sys = build_square_system(model, {d}, orders);
  std::cout << write_system(sys) << "Bezout bound: " << bezout_bound(sys).factored() << "\n\n";

  auto sol = solve_system(sys, Rat(1, 1000000));
  std::cout << "quotient dimension " << sol.quotient_dimension << ", distinct solutions " << sol.distinct_solutions
            << "\n"
            << write_rur(*sol.rur) << "\n";

  EstimateOptions opt;
  opt.orders = orders;
  auto res = estimate(model, data, opt);
  for (std::size_t i = 0; i < res.candidates.size(); ++i) {
    const auto& c = res.candidates[i];
    std::cout << "#" << i + 1 << "  mu = " << to_double(c.params.at("mu").midpoint())
              << "  x(0) = " << to_double(c.initial.at("x").midpoint()) << "  rms = " << c.residual << "\n";
  }
}
