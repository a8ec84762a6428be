// Writes a pair of synthetic female/male life-table files in HMD layout.
#include "mortcast/io.hpp"
#include "mortcast/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic period life tables"};
  std::string out_dir = ".";
  std::uint64_t seed = 7;
  int first_year = 1975;
  int years = 48;
  app.add_option("--output", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--first-year", first_year, "first calendar year");
  app.add_option("--years", years, "number of years");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    for (auto sex : {mortcast::Sex::Female, mortcast::Sex::Male}) {
      auto spec = mortcast::default_synthetic(sex, seed);
      spec.first_year = first_year;
      spec.years = years;
      const auto lt = mortcast::synthetic_life_tables(spec);
      const auto path = std::filesystem::path(out_dir) /
                        (sex == mortcast::Sex::Female ? "fltper_1x1.txt" : "mltper_1x1.txt");
      std::ofstream out(path);
      mortcast::write_hmd_lifetable(out, lt);
      std::cout << path.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
