use crate::types::TypeId;

/// Lexical scope of locals visible to a statement being generated or checked.
///
/// Frame 0 holds the signature's parameters; every nested block pushes a frame.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scope {
    frames: Vec<Vec<(String, TypeId)>>,
}

impl Scope {
    pub fn new() -> Self {
        Scope {
            frames: vec![Vec::new()],
        }
    }

    pub fn with_params<'a, I>(params: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a TypeId)>,
    {
        let mut scope = Scope::new();
        for (name, ty) in params {
            scope.declare(name, ty.clone());
        }
        scope
    }

    pub fn push_frame(&mut self) {
        self.frames.push(Vec::new());
    }

    pub fn pop_frame(&mut self) {
        debug_assert!(self.frames.len() > 1, "cannot pop the parameter frame");
        self.frames.pop();
    }

    pub fn depth(&self) -> usize {
        self.frames.len() - 1
    }

    /// Adds a local to the innermost frame.
    pub fn declare(&mut self, name: impl Into<String>, ty: TypeId) {
        self.frames
            .last_mut()
            .expect("scope always has a frame")
            .push((name.into(), ty));
    }

    /// Innermost binding wins, although generated code never shadows.
    pub fn lookup(&self, name: &str) -> Option<&TypeId> {
        self.frames
            .iter()
            .rev()
            .flat_map(|frame| frame.iter().rev())
            .find(|(n, _)| n == name)
            .map(|(_, ty)| ty)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    /// All visible locals, outermost frame first, declaration order within a frame.
    pub fn locals(&self) -> impl Iterator<Item = (&str, &TypeId)> {
        self.frames
            .iter()
            .flat_map(|frame| frame.iter().map(|(n, t)| (n.as_str(), t)))
    }
}
