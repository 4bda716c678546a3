fn main() {
    // System LAPACK/BLAS; on Debian/Ubuntu the alternatives mechanism may
    // route these to an optimized provider such as OpenBLAS.
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
