#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vamorph/errors.hpp"
#include "vamorph/fixture.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the procedural face fixture dataset"};

    std::string out_dir;
    vamorph::FixtureOptions options;
    app.add_option("--out-dir", out_dir, "Target directory")->required();
    app.add_option("--subjects", options.subjects, "Number of subjects");
    app.add_option("--size", options.width, "Frame side length in pixels");
    app.add_option("--nir-references", options.nir_references,
                   "Number of grayscale reference images");

    CLI11_PARSE(app, argc, argv);
    options.height = options.width;

    try {
        vamorph::write_fixture_dataset(out_dir, options);
    } catch (const vamorph::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::cout << "fixture written to " << out_dir << '\n';
    return 0;
}
