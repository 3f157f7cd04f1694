#include <doctest.h>

#include <fstream>
#include <string>

#include "nbweight/dataset.hpp"
#include "nbweight/errors.hpp"
#include "temp_dir.hpp"

using namespace nbweight;

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}
}  // namespace

TEST_CASE("labels encode by first appearance") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");
    write_text(path, "x0,y\n1.0,a\n2.0,b\n3.0,a\n");
    const Dataset data = load_csv(path, "y");
    CHECK(data.class_count == 2);
    CHECK(data.labels == std::vector<int>{0, 1, 0});
    CHECK(data.label_names == std::vector<std::string>{"a", "b"});
    CHECK(data.ids == std::vector<SampleId>{0, 1, 2});  // no id column: row order
}

TEST_CASE("non-finite feature cells are rejected") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");
    write_text(path, "x0,y\nnan,a\n2.0,b\n");
    std::string message;
    try {
        load_csv(path, "y");
    } catch (const DataError& e) {
        message = e.what();
    }
    CHECK(message.find("non-finite") != std::string::npos);
}

TEST_CASE("load_csv validates structure") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");

    write_text(path, "x0,y\n1.0,a\n2.0,a\n");
    CHECK_THROWS_AS(load_csv(path, "y"), DataError);  // fewer than 2 distinct labels

    write_text(path, "x0,y\n1.0,a\n2.0,b\n");
    CHECK_THROWS_AS(load_csv(path, "z"), DataError);  // label column absent

    write_text(path, "id,x0,y\n4,1.0,a\n4,2.0,b\n");
    CHECK_THROWS_AS(load_csv(path, "y"), DataError);  // duplicate ids

    write_text(path, "x0,y\n1.0,a\n2.0,b\n3.0,c\n");
    LoadOptions opts;
    opts.class_count = 2;
    CHECK_THROWS_AS(load_csv(path, "y", opts), DataError);  // forced count too small
    opts.class_count = 5;
    const Dataset data = load_csv(path, "y", opts);
    CHECK(data.class_count == 5);
}

TEST_CASE("wide multi-class files load with the expected shape") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");
    std::string text;
    for (int f = 0; f < 36; ++f) text += "f" + std::to_string(f) + ",";
    text += "activity\n";
    for (int r = 0; r < 10; ++r) {
        for (int f = 0; f < 36; ++f) text += std::to_string(r) + "." + std::to_string(f) + ",";
        text += "c" + std::to_string(r % 5) + "\n";
    }
    write_text(path, text);
    const Dataset data = load_csv(path, "activity");
    CHECK(data.dim() == 36);
    CHECK(data.class_count == 5);
    CHECK(data.size() == 10);
}

TEST_CASE("save and reload reproduce the dataset") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");
    write_text(path, "id,x0,x1,y\n10,0.125,-3.5,red\n11,2.25,0.75,blue\n12,1.5,9.0,red\n");
    const Dataset data = load_csv(path, "y");

    const auto out = tmp.file("copy.csv");
    save_csv(data, out, "y");
    const Dataset again = load_csv(out, "y");
    CHECK(again.features.values == data.features.values);
    CHECK(again.labels == data.labels);
    CHECK(again.ids == data.ids);
    CHECK(again.label_names == data.label_names);
}

TEST_CASE("subset keeps requested order and validates ids") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");
    write_text(path, "id,x0,y\n10,1.0,a\n11,2.0,b\n12,3.0,a\n");
    const Dataset data = load_csv(path, "y");

    const std::vector<SampleId> keep{12, 10};
    const Dataset sub = subset(data, keep);
    CHECK(sub.ids == keep);
    CHECK(sub.features.at(0, 0) == 3.0);
    CHECK(sub.class_count == data.class_count);

    const std::vector<SampleId> bad{10, 99};
    CHECK_THROWS_AS(subset(data, bad), DataError);
}

TEST_CASE("align_weights requires every id") {
    TempDir tmp;
    const auto path = tmp.file("d.csv");
    write_text(path, "id,x0,y\n10,1.0,a\n11,2.0,b\n");
    const Dataset data = load_csv(path, "y");
    std::unordered_map<SampleId, double> by_id{{10, 0.5}, {11, 2.0}};
    CHECK(align_weights(data, by_id) == std::vector<double>{0.5, 2.0});
    by_id.erase(11);
    CHECK_THROWS_AS(align_weights(data, by_id), DataError);
}

TEST_CASE("point status compares the label to the posterior arg-max") {
    const std::vector<double> p{0.7, 0.3};
    CHECK(point_status(p, 0) == PointStatus::Informative);
    CHECK(point_status(p, 1) == PointStatus::Uncertain);
    const std::vector<double> tie{0.5, 0.5};
    CHECK(point_status(tie, 1) == PointStatus::Informative);  // any arg-max label counts
    CHECK_THROWS_AS(point_status(p, 2), DataError);
    const std::vector<double> bad{0.7, 0.7};
    CHECK_THROWS_AS(point_status(bad, 0), DataError);
}
