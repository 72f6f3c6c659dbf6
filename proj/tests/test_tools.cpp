#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace geoagent;
using test_support::fresh_dir;
using test_support::make_test_registry;

namespace {

const char* kExpectedNames[] = {
    "Get_POI_By_Keywords",
    "Get_POI_By_Polygon",
    "Get_Road_Network_By_Rectangle",
    "Get_Remote_Sensing_Image",
    "Load_Subway_Data",
    "Load_Hotel_Data",
    "Load_Factory_Data",
    "Load_Supermarket_Data",
    "Load_Remote_Sensing_Image_Data",
    "Load_Wuhan_Main_Urban_Data",
    "Obtain location",
    "Buffer",
    "Intersect",
    "Clip",
    "Erase",
    "Crop_Remote_Sensing_Image",
    "LandUse_Classification",
    "Raster_to_Vector",
    "Mapping",
};

// golden copy of every registry description, pinned byte for byte
const std::map<std::string, std::string> kExpectedDescriptions = {
    {"Get_POI_By_Keywords",
     "Use this tool when you need to get POI data for a Chinese city by POI "
     "keywords. The input of this tool must at least provide the city name, "
     "after which the user can provide multiple POI categories or none. City "
     "names and each POI category are separated by commas."},
    {"Get_POI_By_Polygon",
     "Use this tool when you need to get POI data within a polygonal area. "
     "Input a longitude-latitude coordinate pair representing the area of the "
     "polygon. Longitude and latitude are separated by \",\", and the "
     "coordinate pairs are separated by \"|\". The first and last coordinate "
     "pairs need to be the same."},
    {"Get_Road_Network_By_Rectangle",
     "Use this tool when you need to get road network data within a "
     "rectangular area. Input a comma-separated string of four-tuples, "
     "representing two longitude ranges x1, x2 enclosed in a rectangle, and "
     "two latitude ranges y1, y2 enclosed in a rectangle."},
    {"Get_Remote_Sensing_Image",
     "Input parameters, in order of province, city, start time and end time, "
     "in comma-separated strings"},
    {"Load_Subway_Data",
     "Load the dataset of subway stations, return the file path of subway "
     "stations."},
    {"Load_Hotel_Data", "Load the dataset of hotels, return the file path of hotels."},
    {"Load_Factory_Data",
     "Load the dataset of factories, return the file path of factories."},
    {"Load_Supermarket_Data",
     "Load the dataset of supermarkets, return the file path of supermarkets."},
    {"Load_Remote_Sensing_Image_Data",
     "Load the dataset of remote sensing image, return the file path of RS "
     "image."},
    {"Load_Wuhan_Main_Urban_Data",
     "Load the dataset of Wuhan main urban, return the file path of Wuhan main "
     "urban."},
    {"Obtain location",
     "Input a place name, return its location. Use it when you need to find "
     "unknown locations."},
    {"Buffer",
     "Input \"shapefile, number\", return the neighboring range around this "
     "shapefile."},
    {"Intersect",
     "Input two shapefiles, retain objects meanwhile within (inside) both "
     "shapefiles."},
    {"Clip",
     "Input two shapefiles \"A, B\", return (keep) objects of A only within "
     "(inside) the range of B."},
    {"Erase",
     "Input two shapefiles \"A, B\", remove (erase) objects of A only within "
     "(inside) the range of B."},
    {"Crop_Remote_Sensing_Image",
     "Use this tool when you need to crop an image of Remote Sensing. Input a "
     "tif file storing remote sensing and a shapefile storing the cropping "
     "area, which are separated by a comma."},
    {"LandUse_Classification",
     "Use this tool when you need to perform land use classification on remote "
     "sensing imagery in a tif file. Input a tif file storing remote sensing "
     "image, and output a raster file (tif format) after land use "
     "classification."},
    {"Raster_to_Vector",
     "Use this tool when you need to convert raster files (e.g., tif format) "
     "to vector files. Input a raster file, and output the storage path of the "
     "converted vector file."},
    {"Mapping",
     "Use this tool when you need to draw a map using geographic data stored "
     "in vector files (e.g., shapefiles). The input must be a vector file that "
     "needs to draw a map. The tool outputs the storage path of the drawn "
     "map."},
};

const char* kT1 =
    "An exception occurred using this tool, I need to check whether the input "
    "file exists, or whether the input contains excessive content, or whether "
    "the input format is correct, or whether the input file order is correct, "
    "or and whether I have selected the wrong tool";

const char* kT2 =
    "An exception occurred using this tool, I need to check whether the input "
    "file is a vector file, whether the input file is exists, and whether I "
    "have selected the wrong tool";

}  // namespace

TEST_CASE("default pool holds exactly the nineteen tools in order") {
  auto reg = make_test_registry(fresh_dir("reg"));
  auto names = reg.names();
  REQUIRE(names.size() == 19);
  for (std::size_t i = 0; i < names.size(); ++i) REQUIRE(names[i] == kExpectedNames[i]);
}

TEST_CASE("extras flag adds Union and Composite_Bands") {
  auto opts = test_support::test_registry_options(fresh_dir("reg"));
  opts.include_extras = true;
  auto reg = register_default_pool(make_mock_providers(test_support::data_use()), opts);
  auto names = reg.names();
  REQUIRE(names.size() == 21);
  REQUIRE(names[19] == "Union");
  REQUIRE(names[20] == "Composite_Bands");
}

TEST_CASE("registry descriptions match the pinned text byte for byte") {
  auto reg = make_test_registry(fresh_dir("reg"));
  for (const auto& tool : reg.tools()) {
    INFO(tool.name);
    REQUIRE(kExpectedDescriptions.at(tool.name) == tool.description);
  }
}

TEST_CASE("a missing loader fixture fails registry construction") {
  auto opts = test_support::test_registry_options(fresh_dir("reg"));
  opts.loader_paths["subway"] = "case2/not_there.shp";
  REQUIRE_THROWS_AS(
      register_default_pool(make_mock_providers(test_support::data_use()), opts),
      MissingFixture);
}

TEST_CASE("unknown tools come back as the invalid-tool observation") {
  auto reg = make_test_registry(fresh_dir("disp"));
  auto obs = dispatch(reg, "Load_Hubei_University_Data", "None");
  REQUIRE_FALSE(obs.ok);
  REQUIRE(obs.text == "Load_Hubei_University_Data is not a valid tool, try another one.");
}

TEST_CASE("dispatch is total over arbitrary name and input strings") {
  auto reg = make_test_registry(fresh_dir("disp"));
  std::mt19937 rng(13);
  for (int i = 0; i < 300; ++i) {
    std::string name, input;
    int nlen = static_cast<int>(rng() % 24);
    int ilen = static_cast<int>(rng() % 64);
    for (int k = 0; k < nlen; ++k) name += static_cast<char>(32 + rng() % 95);
    for (int k = 0; k < ilen; ++k) input += static_cast<char>(rng() % 256);
    auto obs = dispatch(reg, name, input);
    REQUIRE_FALSE(obs.text.empty());
  }
  // hostile inputs against every real tool
  for (const auto& tool : reg.tools()) {
    for (const char* input : {"", "None", ",,,,", "\"\"", "not/a/file, x, y"}) {
      auto obs = dispatch(reg, tool.name, input);
      REQUIRE_FALSE(obs.text.empty());
    }
  }
}

TEST_CASE("buffer forms the observation, writes the artifact, renders 500 as 500.0") {
  std::string out = fresh_dir("buf");
  auto reg = make_test_registry(out);
  std::string input = test_support::data_use() + "/case2/subway_station.shp, 500";
  auto obs = dispatch(reg, "Buffer", input);
  REQUIRE(obs.ok);
  std::string expected = "I obtain the neighboring area with a distance of 500.0 for " +
                         test_support::data_use() + "/case2/subway_station.shp" +
                         ", it is stored in " + out +
                         "/subway_station_neighborhood_500.0.shp";
  REQUIRE(obs.text == expected);
  REQUIRE(obs.artifacts.size() == 1);
  REQUIRE(std::filesystem::exists(obs.artifacts[0].path));
  auto written = read_vector(out + "/subway_station_neighborhood_500.0.shp");
  REQUIRE(written.dimension == 2);
}

TEST_CASE("buffer failures all collapse to the generic template") {
  auto reg = make_test_registry(fresh_dir("buf"));
  for (const char* input :
       {"Subway Stations, 500", "./data_use/case2/subway_station.shp",
        "./data_use/case2/subway_station.shp, abc",
        "./data_use/case2/subway_station.shp, 0",
        "./data_use/case2/subway_station.shp, -3"}) {
    auto obs = dispatch(reg, "Buffer", input);
    REQUIRE_FALSE(obs.ok);
    REQUIRE(obs.text == kT1);
  }
}

TEST_CASE("loaders answer with the fixture path and ignore their input") {
  auto reg = make_test_registry(fresh_dir("load"));
  auto obs = dispatch(reg, "Load_Subway_Data", "None");
  REQUIRE(obs.ok);
  REQUIRE(obs.text == "I obtain the dataset of subway stations, it is stored in " +
                          test_support::data_use() + "/case2/subway_station.shp");
  REQUIRE(dispatch(reg, "Load_Wuhan_Main_Urban_Data", "whatever").ok);
}

TEST_CASE("obtain location writes a point dataset named after the place") {
  std::string out = fresh_dir("loc");
  auto reg = make_test_registry(out);
  auto obs = dispatch(reg, "Obtain location", "Hubei University");
  REQUIRE(obs.ok);
  REQUIRE(obs.text == "I obtain the location of Hubei University, it is stored in " +
                          out + "/Hubei University.shp");
  auto fc = read_vector(out + "/Hubei University.shp");
  REQUIRE(fc.features.size() == 1);
  REQUIRE(fc.dimension == 0);
  REQUIRE(dispatch(reg, "Obtain location", "").text == kT1);
  REQUIRE(dispatch(reg, "Obtain location", "nonexistent place xyz").text == kT1);
}

TEST_CASE("the clip dimension matrix follows the pre-judgment rule") {
  std::string dir = fresh_dir("clipdim");
  auto pts = test_support::point_collection({{0.5, 0.5}});
  FeatureCollection lines;
  lines.features.push_back({Geometry::line_string({{0, 0}, {1, 1}}), {}});
  normalize(lines);
  auto polys = test_support::collection_of({test_support::square(0, 0, 1, 1)});
  write_vector(pts, dir + "/d0.shp");
  write_vector(lines, dir + "/d1.shp");
  write_vector(polys, dir + "/d2.shp");
  auto path = [&](int d) { return dir + "/d" + std::to_string(d) + ".shp"; };
  for (int da = 0; da <= 2; ++da) {
    for (int db = 0; db <= 2; ++db) {
      bool allowed = db >= 1 && db >= da;
      INFO("global=" << da << " boundary=" << db);
      if (allowed)
        REQUIRE_NOTHROW(validate_clip_input(path(da), path(db)));
      else
        REQUIRE_THROWS_AS(validate_clip_input(path(da), path(db)),
                          DimensionRuleViolation);
    }
  }
}

TEST_CASE("clip tool surfaces the dimension rule as the generic template") {
  std::string dir = fresh_dir("cliptool");
  auto reg = make_test_registry(dir);
  FeatureCollection lines;
  lines.features.push_back({Geometry::line_string({{0, 0}, {1, 1}}), {}});
  normalize(lines);
  auto polys = test_support::collection_of({test_support::square(0, 0, 1, 1)});
  write_vector(lines, dir + "/lines.shp");
  write_vector(polys, dir + "/polys.shp");
  auto bad = dispatch(reg, "Clip", dir + "/polys.shp, " + dir + "/lines.shp");
  REQUIRE(bad.text == kT1);
  // points clipped by polygons succeed
  auto pts = test_support::point_collection({{0.5, 0.5}, {9, 9}});
  write_vector(pts, dir + "/pts.shp");
  auto good = dispatch(reg, "Clip", dir + "/pts.shp, " + dir + "/polys.shp");
  REQUIRE(good.ok);
  auto clipped = read_vector(dir + "/clip.shp");
  REQUIRE(clipped.features.size() == 1);
}

TEST_CASE("POI keyword queries write the fixture subset as CSV") {
  std::string out = fresh_dir("poi");
  auto reg = make_test_registry(out);
  auto obs = dispatch(reg, "Get_POI_By_Keywords", "Beijing, restaurants, hotels");
  REQUIRE(obs.ok);
  REQUIRE(obs.text == "In this step I obtain POIs that meet the requirements, it is "
                      "stored at " + out + "/POI/POI.csv");
  auto rows = read_poi_csv(out + "/POI/POI.csv");
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    REQUIRE(r.city == "Beijing");
    REQUIRE((r.category == "restaurants" || r.category == "hotels"));
  }
  // city only: every Beijing fixture row
  dispatch(reg, "Get_POI_By_Keywords", "Beijing");
  REQUIRE(read_poi_csv(out + "/POI/POI.csv").size() == 9);
  REQUIRE(dispatch(reg, "Get_POI_By_Keywords", "").text == kT1);
}

TEST_CASE("POI polygon queries require a closed ring unless the flag allows open") {
  std::string out = fresh_dir("poly");
  auto reg = make_test_registry(out);
  std::string open = "39.820,116.260|39.990,116.260|39.990,116.490|39.820,116.490";
  REQUIRE(dispatch(reg, "Get_POI_By_Polygon", open).text == kT1);
  std::string closed = open + "|39.820,116.260";
  auto obs = dispatch(reg, "Get_POI_By_Polygon", closed);
  REQUIRE(obs.ok);
  auto rows = read_poi_csv(out + "/POI/POI.csv");
  REQUIRE_FALSE(rows.empty());
  for (const auto& r : rows) {
    REQUIRE(r.lat >= 39.820);
    REQUIRE(r.lat <= 39.990);
    REQUIRE(r.lon >= 116.260);
    REQUIRE(r.lon <= 116.490);
  }
  REQUIRE(dispatch(reg, "Get_POI_By_Polygon", "abc|def").text == kT1);

  auto opts = test_support::test_registry_options(out);
  opts.auto_close_poi_ring = true;
  auto lenient =
      register_default_pool(make_mock_providers(test_support::data_use()), opts);
  REQUIRE(dispatch(lenient, "Get_POI_By_Polygon", open).ok);
}

TEST_CASE("road rectangle downloads clip fixture lines to the box") {
  std::string out = fresh_dir("road");
  auto reg = make_test_registry(out);
  auto obs = dispatch(reg, "Get_Road_Network_By_Rectangle",
                      "-8.7,-8.519847,41.064999,41.189018");
  REQUIRE(obs.ok);
  REQUIRE(obs.text == "Spend time: 34.473637342453 seconds. In this step I obtain "
                      "Road Networks that meet the requirements, it is stored at " +
                          out + "/road_network");
  auto roads = read_vector(out + "/road_network");
  REQUIRE(roads.dimension == 1);
  REQUIRE_FALSE(roads.features.empty());
  Box bb = bounds(roads);
  REQUIRE(bb.minx >= -8.7 - 1e-9);
  REQUIRE(bb.maxx <= -8.519847 + 1e-9);
  // inverted ranges fail
  REQUIRE(dispatch(reg, "Get_Road_Network_By_Rectangle", "-8.5,-8.7,41,41.2").text ==
          kT1);
  // empty box still succeeds with an empty dataset
  auto empty = dispatch(reg, "Get_Road_Network_By_Rectangle", "10,11,10,11");
  REQUIRE(empty.ok);
  REQUIRE(read_vector(out + "/road_network").features.empty());
}

TEST_CASE("remote sensing downloads validate their date range") {
  std::string out = fresh_dir("rs");
  auto reg = make_test_registry(out);
  auto obs = dispatch(reg, "Get_Remote_Sensing_Image",
                      "Hubei, Wuhan, 2015-02-10, 2015-02-20");
  REQUIRE(obs.ok);
  REQUIRE(obs.text == "Remote sensing data has been downloaded and saved in " + out +
                          "/rs_image. My work is done!");
  REQUIRE_FALSE(obs.artifacts.empty());
  REQUIRE(std::filesystem::exists(obs.artifacts[0].path));
  REQUIRE(dispatch(reg, "Get_Remote_Sensing_Image",
                   "Hubei, Wuhan, 2015-02-20, 2015-02-10")
              .text == kT1);
  REQUIRE(dispatch(reg, "Get_Remote_Sensing_Image", "Hubei, Wuhan, notadate, 2015-02-20")
              .text == kT1);
  REQUIRE(dispatch(reg, "Get_Remote_Sensing_Image", "Hubei, Wuhan, 2015-02-10").text ==
          kT1);
}

TEST_CASE("the raster pipeline tools chain over the case fixtures") {
  std::string out = fresh_dir("rpipe");
  auto reg = make_test_registry(out);
  auto crop = dispatch(reg, "Crop_Remote_Sensing_Image",
                       "./data_use/case4/data.tif, ./data_use/case4/WuhanMainCountry.shp");
  REQUIRE(crop.ok);
  REQUIRE(crop.text == "In this step I obtain cropped RS image that meet the "
                       "requirements, it is stored at " + out + "/RS_crop.tif");
  auto lucc = dispatch(reg, "LandUse_Classification", out + "/RS_crop.tif");
  REQUIRE(lucc.ok);
  REQUIRE(lucc.text == "In this step I obtain RS image after land use classification, "
                       "it is stored in a raster file at " + out + "/lucc.tif");
  auto vec = dispatch(reg, "Raster_to_Vector", out + "/lucc.tif");
  REQUIRE(vec.ok);
  REQUIRE(vec.text == "In this step I obtain the converted vector file (shapefile "
                      "format) based on the raster file, it is stored at " + out +
                          "/polyone.shp");
  auto map = dispatch(reg, "Mapping", out + "/polyone.shp");
  REQUIRE(map.ok);
  REQUIRE(map.text == "In this step I obtain the visual map that meet the "
                      "requirements, it is stored at " + out + "/visual_map.png");
  REQUIRE(std::filesystem::exists(out + "/visual_map.png"));
  REQUIRE(std::filesystem::exists(out + "/visual_map.svg"));
}

TEST_CASE("mapping a raster file yields the mapping-specific template") {
  std::string out = fresh_dir("map2");
  auto reg = make_test_registry(out);
  auto obs = dispatch(reg, "Mapping", "./data_use/case4/data.tif");
  REQUIRE_FALSE(obs.ok);
  REQUIRE(obs.text == kT2);
  REQUIRE(dispatch(reg, "Mapping", "./nope/missing.shp").text == kT2);
}

TEST_CASE("corrected template wording is available behind the flag") {
  auto opts = test_support::test_registry_options(fresh_dir("tmpl"));
  opts.verbatim_templates = false;
  auto reg = register_default_pool(make_mock_providers(test_support::data_use()), opts);
  auto obs = dispatch(reg, "Buffer", "missing.shp, 500");
  REQUIRE(obs.text.find("or and whether") == std::string::npos);
  REQUIRE(obs.text.find("and whether I have selected the wrong tool") !=
          std::string::npos);
  auto mapping = dispatch(reg, "Mapping", "./nope.shp");
  REQUIRE(mapping.text.find("is exists") == std::string::npos);
}

TEST_CASE("success observations always reference artifacts that exist") {
  std::string out = fresh_dir("exist");
  auto reg = make_test_registry(out);
  std::vector<std::pair<std::string, std::string>> calls = {
      {"Load_Subway_Data", "None"},
      {"Buffer", "./data_use/case2/subway_station.shp, 500"},
      {"Get_POI_By_Keywords", "Beijing"},
      {"Obtain location", "Wuhan"},
      {"Crop_Remote_Sensing_Image",
       "./data_use/case4/data.tif, ./data_use/case4/WuhanMainCountry.shp"},
  };
  for (const auto& [name, input] : calls) {
    auto obs = dispatch(reg, name, input);
    INFO(name);
    REQUIRE(obs.ok);
    REQUIRE_FALSE(obs.artifacts.empty());
    for (const auto& a : obs.artifacts) REQUIRE(std::filesystem::exists(a.path));
  }
}

TEST_CASE("output collisions archive the previous file under a timestamp suffix") {
  std::string out = fresh_dir("arch");
  auto reg = make_test_registry(out);
  REQUIRE(dispatch(reg, "Obtain location", "Wuhan").ok);
  REQUIRE(dispatch(reg, "Obtain location", "Wuhan").ok);
  int baks = 0;
  for (const auto& entry : std::filesystem::directory_iterator(out))
    if (entry.path().string().ends_with(".bak")) ++baks;
  REQUIRE(baks == 1);
}

TEST_CASE("tool outputs land in the per-directory manifest") {
  std::string out = fresh_dir("manif");
  auto reg = make_test_registry(out);
  dispatch(reg, "Buffer", "./data_use/case2/subway_station.shp, 500");
  dispatch(reg, "Get_POI_By_Keywords", "Beijing");
  auto entries = load_manifest(out);
  REQUIRE(entries.at("subway_station_neighborhood_500.0.shp") == "Vector");
  auto poi_entries = load_manifest(out + "/POI");
  REQUIRE(poi_entries.at("POI.csv") == "Table");
}

TEST_CASE("extras operate behind the flag") {
  std::string out = fresh_dir("extras");
  auto opts = test_support::test_registry_options(out);
  opts.include_extras = true;
  auto reg = register_default_pool(make_mock_providers(test_support::data_use()), opts);
  std::string dir = fresh_dir("extras_data");
  write_vector(test_support::collection_of({test_support::square(0, 0, 1, 1)}),
               dir + "/a.shp");
  write_vector(test_support::collection_of({test_support::square(5, 5, 6, 6)}),
               dir + "/b.shp");
  auto obs = dispatch(reg, "Union", dir + "/a.shp, " + dir + "/b.shp");
  REQUIRE(obs.ok);
  REQUIRE(area(read_vector(out + "/union.shp")) == Catch::Approx(2.0));
  RasterGrid g;
  g.width = 2;
  g.height = 2;
  g.origin = {0, 2};
  g.cell_size = 1;
  g.bands = {{1, 2, 3, 4}};
  write_raster(g, dir + "/r1.tif");
  write_raster(g, dir + "/r2.tif");
  auto comp = dispatch(reg, "Composite_Bands", dir + "/r1.tif, " + dir + "/r2.tif");
  REQUIRE(comp.ok);
  REQUIRE(read_raster(out + "/composite.tif").bands.size() == 2);
  // arity and mismatch failures surface as the template
  REQUIRE(dispatch(reg, "Composite_Bands", dir + "/r1.tif").text == kT1);
}
