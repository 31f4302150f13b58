// Integration tests for the command-line tool: each case drives the built
// binary as a subprocess against a throwaway state directory, with node
// daemons on loopback TCP.

#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "abestore/bytes.hpp"
#include "doctest.h"

#ifndef ABESTORE_CLI_PATH
#define ABESTORE_CLI_PATH "abestore"
#endif

namespace fs = std::filesystem;
using abestore::Bytes;

namespace {

struct CliWorld {
    fs::path dir;
    std::vector<pid_t> daemons;
    std::string an_id, sn_id;
    uint16_t an_port, sn_port;

    CliWorld() {
        dir = fs::temp_directory_path() /
              ("abestore-cli-test-" + std::to_string(::getpid()) + "-" +
               std::to_string(counter()++));
        fs::create_directories(dir);
        // Derive ports from the pid so parallel test runs do not collide.
        an_port = uint16_t(20000 + (::getpid() * 7) % 20000);
        sn_port = uint16_t(an_port + 1);
    }

    ~CliWorld() {
        for (pid_t pid : daemons) {
            ::kill(pid, SIGTERM);
            int status = 0;
            ::waitpid(pid, &status, 0);
        }
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    static int& counter() {
        static int c = 0;
        return c;
    }

    // Runs one CLI command; returns the exit code and captures stdout.
    int run(const std::string& args, std::string* out = nullptr) const {
        fs::path out_file = dir / "cmd-out";
        std::string cmd = std::string("ABESTORE_STATE=") + (dir / "state").string() + " " +
                          ABESTORE_CLI_PATH + " " + args + " > " + out_file.string() +
                          " 2>&1";
        int status = std::system(cmd.c_str());
        if (out) {
            std::ifstream in(out_file);
            std::ostringstream buf;
            buf << in.rdbuf();
            *out = buf.str();
        }
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    void start_daemon(const std::string& role, const std::string& id, uint16_t port) {
        pid_t pid = ::fork();
        REQUIRE(pid >= 0);
        if (pid == 0) {
            std::string state = (dir / "state").string();
            std::string port_s = std::to_string(port);
            ::setenv("ABESTORE_STATE", state.c_str(), 1);
            ::execl(ABESTORE_CLI_PATH, "abestore", "node", "run", "--role", role.c_str(),
                    "--id", id.c_str(), "--port", port_s.c_str(), (char*)nullptr);
            ::_exit(127);
        }
        daemons.push_back(pid);
    }

    // Initializes a system, provisions one node of each kind, starts the
    // daemons, and enrolls one consumer.
    void bootstrap() {
        REQUIRE(run("init --engine mock --attrs finance,audit") == 0);
        std::string out;
        REQUIRE(run("admin provision --role authz --attrs finance,audit --address 127.0.0.1:" +
                        std::to_string(an_port),
                    &out) == 0);
        an_id = out.substr(0, out.find('\n'));
        REQUIRE(run("admin provision --role service --address 127.0.0.1:" +
                        std::to_string(sn_port),
                    &out) == 0);
        sn_id = out.substr(0, out.find('\n'));
        REQUIRE(run("consumer enroll --name alice --attrs finance --validity v1,v2") == 0);

        start_daemon("authz", an_id, an_port);
        start_daemon("service", sn_id, sn_port);
        std::this_thread::sleep_for(std::chrono::milliseconds(300));
    }

    fs::path write_blob(const std::string& name, const Bytes& data) const {
        fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
        return p;
    }

    Bytes read_blob(const fs::path& p) const {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string s = buf.str();
        return Bytes(s.begin(), s.end());
    }
};

Bytes pattern(size_t n) {
    Bytes out(n);
    for (size_t i = 0; i < n; ++i) out[i] = uint8_t(i * 37 + (i >> 8));
    return out;
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
    CliWorld w;
    CHECK(w.run("definitely-not-a-command") == 2);
    CHECK(w.run("consumer get") == 2);            // missing required flags
    CHECK(w.run("admin provision --role authz") == 2);
}

TEST_CASE("cli: init is idempotent-hostile and list-index reflects provisioning") {
    CliWorld w;
    REQUIRE(w.run("init --engine mock --attrs a1,a2 --x 3 --u 1") == 0);
    CHECK(w.run("init --engine mock --attrs a1") == 3);  // already initialized

    std::string out;
    REQUIRE(w.run("admin provision --role authz --attrs a1 --address 127.0.0.1:1", &out) == 0);
    std::string an = out.substr(0, out.find('\n'));
    REQUIRE(w.run("admin list-index", &out) == 0);
    CHECK(out.find(an) != std::string::npos);
    CHECK(out.find("authz") != std::string::npos);
    CHECK(out.find("a1") != std::string::npos);
}

TEST_CASE("cli: put then get reproduces the file byte for byte") {
    CliWorld w;
    w.bootstrap();

    Bytes data = pattern(150000);
    fs::path in = w.write_blob("x.bin", data);
    fs::path out_file = w.dir / "y.bin";

    REQUIRE(w.run("consumer auth --name alice --node " + w.an_id) == 0);
    REQUIRE(w.run("consumer put --name alice --node " + w.sn_id +
                  " --id f1 --policy finance --file " + in.string()) == 0);
    REQUIRE(w.run("consumer get --name alice --node " + w.sn_id + " --id f1 --out " +
                  out_file.string()) == 0);
    CHECK(w.read_blob(out_file) == data);

    SUBCASE("range get and range write") {
        REQUIRE(w.run("consumer get --name alice --node " + w.sn_id +
                      " --id f1 --offset 70000 --length 500 --out " + out_file.string()) == 0);
        CHECK(w.read_blob(out_file) == Bytes(data.begin() + 70000, data.begin() + 70500));

        Bytes patch(600, 0xab);
        fs::path patch_file = w.write_blob("patch.bin", patch);
        REQUIRE(w.run("consumer write --name alice --node " + w.sn_id +
                      " --id f1 --offset 65000 --file " + patch_file.string()) == 0);
        REQUIRE(w.run("consumer get --name alice --node " + w.sn_id + " --id f1 --out " +
                      out_file.string()) == 0);
        Bytes want = data;
        std::copy(patch.begin(), patch.end(), want.begin() + 65000);
        CHECK(w.read_blob(out_file) == want);
    }

    SUBCASE("policy violation carries its own exit code") {
        // alice lacks "audit", so she cannot store under that policy.
        CHECK(w.run("consumer put --name alice --node " + w.sn_id +
                    " --id f2 --policy audit --file " + in.string()) == 17);  // 10+PolicyUnsatisfied
    }
}

TEST_CASE("cli: get without a session is a usage error") {
    CliWorld w;
    w.bootstrap();
    CHECK(w.run("consumer get --name alice --node " + w.sn_id + " --id f1 --out /dev/null") ==
          2);
}

TEST_CASE("cli: revocation locks out the old key and re-keys the holder file") {
    CliWorld w;
    w.bootstrap();

    REQUIRE(w.run("consumer auth --name alice --node " + w.an_id) == 0);

    fs::path cred = w.dir / "state" / "creds" / "alice.cred";
    Bytes old_cred = w.read_blob(cred);

    std::string out;
    REQUIRE(w.run("admin revoke-validity v1", &out) == 0);
    CHECK(out.find("re-keyed consumer alice") != std::string::npos);

    // The credential file was rotated in place; auth with it succeeds.
    CHECK(w.read_blob(cred) != old_cred);
    CHECK(w.run("consumer auth --name alice --node " + w.an_id) == 0);

    // The pre-revocation key no longer authenticates (distinct exit code).
    w.write_blob("state/creds/alice.cred", old_cred);
    CHECK(w.run("consumer auth --name alice --node " + w.an_id) == 24);  // 10+DecryptFailed
}

TEST_CASE("cli: sim run executes a scenario") {
    CliWorld w;
    std::string out;
    REQUIRE(w.run(std::string("sim run ") + ABESTORE_SCENARIO_DIR + "/weak-eavesdrop.scn",
                  &out) == 0);
    CHECK(out.find("transcript:") != std::string::npos);
    CHECK(out.find("occurred=no") != std::string::npos);
}
