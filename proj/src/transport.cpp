#include "qotsim/transport.hpp"

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/evp.h>

#include "qotsim/xof.hpp"

namespace qotsim {

namespace {

struct Mailbox {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Frame> q;
    bool closed = false;

    void push(Frame f) {
        {
            std::lock_guard lk(mu);
            q.push_back(std::move(f));
        }
        cv.notify_one();
    }
    Frame pop() {
        std::unique_lock lk(mu);
        cv.wait(lk, [&] { return !q.empty() || closed; });
        if (q.empty()) throw TransportError("loopback peer closed");
        Frame f = std::move(q.front());
        q.pop_front();
        return f;
    }
    void close() {
        {
            std::lock_guard lk(mu);
            closed = true;
        }
        cv.notify_all();
    }
};

class LoopbackEnd final : public Duplex {
public:
    LoopbackEnd(std::shared_ptr<Mailbox> out, std::shared_ptr<Mailbox> in)
        : out_(std::move(out)), in_(std::move(in)) {}
    ~LoopbackEnd() override { out_->close(); }

    void send(const Frame& f) override {
        // run the frame codec so loopback exercises the same wire format
        auto raw = encode_frame(f);
        Frame copy;
        size_t used = 0;
        if (decode_frame(raw, copy, used) != DecodeStatus::Ok || used != raw.size())
            throw TransportError("loopback: frame failed self-decode");
        out_->push(std::move(copy));
    }
    Frame recv() override { return in_->pop(); }

private:
    std::shared_ptr<Mailbox> out_, in_;
};

class SocketDuplex final : public Duplex {
public:
    explicit SocketDuplex(int fd) : fd_(fd) {}
    ~SocketDuplex() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void send(const Frame& f) override {
        auto raw = encode_frame(f);
        size_t off = 0;
        while (off < raw.size()) {
            ssize_t n = ::send(fd_, raw.data() + off, raw.size() - off, MSG_NOSIGNAL);
            if (n <= 0) throw TransportError("socket send failed");
            off += size_t(n);
        }
    }

    Frame recv() override {
        Frame f;
        while (true) {
            size_t used = 0;
            switch (decode_frame(buf_, f, used)) {
                case DecodeStatus::Ok:
                    buf_.erase(buf_.begin(), buf_.begin() + used);
                    return f;
                case DecodeStatus::BadTag:
                    throw TransportError("unknown frame tag on socket");
                case DecodeStatus::Oversize:
                    throw TransportError("oversize frame on socket");
                case DecodeStatus::NeedMore:
                    break;
            }
            uint8_t chunk[65536];
            ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n <= 0) throw TransportError("socket closed by peer");
            buf_.insert(buf_.end(), chunk, chunk + n);
        }
    }

private:
    int fd_ = -1;
    std::vector<uint8_t> buf_;
};

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

} // namespace

std::pair<std::unique_ptr<Duplex>, std::unique_ptr<Duplex>> make_loopback_pair() {
    auto a2b = std::make_shared<Mailbox>();
    auto b2a = std::make_shared<Mailbox>();
    return {std::make_unique<LoopbackEnd>(a2b, b2a),
            std::make_unique<LoopbackEnd>(b2a, a2b)};
}

std::unique_ptr<Duplex> tcp_listen_accept(uint16_t port) {
    int srv = ::socket(AF_INET, SOCK_STREAM, 0);
    if (srv < 0) throw TransportError("socket() failed");
    int one = 1;
    ::setsockopt(srv, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(port);
    if (::bind(srv, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(srv, 1) < 0) {
        ::close(srv);
        throw TransportError("bind/listen failed");
    }
    int fd = ::accept(srv, nullptr, nullptr);
    ::close(srv);
    if (fd < 0) throw TransportError("accept failed");
    set_nodelay(fd);
    return std::make_unique<SocketDuplex>(fd);
}

std::unique_ptr<Duplex> tcp_connect(const std::string& host, uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw TransportError("bad address: " + host);
    }
    for (int attempt = 0; attempt < 200; ++attempt) {
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
            set_nodelay(fd);
            return std::make_unique<SocketDuplex>(fd);
        }
        usleep(20000);
    }
    ::close(fd);
    throw TransportError("connect failed: " + host);
}

// --- transcript digests ------------------------------------------------------

struct TranscriptDuplex::Impl {
    std::unique_ptr<Duplex> inner;
    Role role;
    EVP_MD_CTX* out_ctx;
    EVP_MD_CTX* in_ctx;

    Impl(std::unique_ptr<Duplex> d, Role r) : inner(std::move(d)), role(r) {
        out_ctx = EVP_MD_CTX_new();
        in_ctx = EVP_MD_CTX_new();
        EVP_DigestInit_ex(out_ctx, EVP_sha256(), nullptr);
        EVP_DigestInit_ex(in_ctx, EVP_sha256(), nullptr);
    }
    ~Impl() {
        EVP_MD_CTX_free(out_ctx);
        EVP_MD_CTX_free(in_ctx);
    }
    void fold(EVP_MD_CTX* ctx, const Frame& f) {
        auto raw = encode_frame(f);
        EVP_DigestUpdate(ctx, raw.data(), raw.size());
    }
};

TranscriptDuplex::TranscriptDuplex(std::unique_ptr<Duplex> inner, Role role)
    : impl_(std::make_unique<Impl>(std::move(inner), role)) {}

TranscriptDuplex::~TranscriptDuplex() = default;

void TranscriptDuplex::send(const Frame& f) {
    impl_->fold(impl_->out_ctx, f);
    impl_->inner->send(f);
}

Frame TranscriptDuplex::recv() {
    Frame f = impl_->inner->recv();
    impl_->fold(impl_->in_ctx, f);
    return f;
}

std::array<uint8_t, 32> TranscriptDuplex::digest() const {
    auto clone_final = [](EVP_MD_CTX* src) {
        std::array<uint8_t, 32> out{};
        EVP_MD_CTX* tmp = EVP_MD_CTX_new();
        EVP_MD_CTX_copy_ex(tmp, src);
        unsigned len = 32;
        EVP_DigestFinal_ex(tmp, out.data(), &len);
        EVP_MD_CTX_free(tmp);
        return out;
    };
    auto a = clone_final(impl_->out_ctx);
    auto b = clone_final(impl_->in_ctx);
    // canonical order: initiator->responder stream first
    if (impl_->role == Role::Responder) std::swap(a, b);
    std::vector<uint8_t> cat;
    cat.insert(cat.end(), a.begin(), a.end());
    cat.insert(cat.end(), b.begin(), b.end());
    auto d = shake256(cat, 32);
    std::array<uint8_t, 32> out{};
    std::copy(d.begin(), d.end(), out.begin());
    return out;
}

} // namespace qotsim
